import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_interval
from mpma.approximation import IntervalModule, approximate_module
from mpma.fixtures import fig12_pair, fixture_info
from mpma.grid import Box, DiagonalLine, point_at
from mpma.metrics import (
    _ShiftCheck,
    bottleneck_estimate,
    default_probe,
    dimension_at,
    estimate_interleaving,
    fibered_barcode,
    interval_bar,
    rasterize,
    recthull,
)

INF = np.inf
ORIGIN = DiagonalLine((0.0, 0.0))


def test_recthull_examples():
    H = recthull([(0, 2), (1, 0)])
    assert H.low.tolist() == [0, 0] and H.high.tolist() == [1, 2]
    H = recthull([(3, 4)])
    assert H.low.tolist() == H.high.tolist() == [3, 4]
    with pytest.raises(ValueError):
        recthull([])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=1, max_size=20))
def test_recthull_contains_inputs(points):
    H = recthull(points)
    assert all(H.contains(p) for p in points)


def test_fibered_barcode_rectangle():
    I = IntervalModule([(0, 0)], [(2, 3)])
    (bar,) = fibered_barcode(I, ORIGIN).bars
    assert (bar.birth_t, bar.death_t) == (0, 2)
    assert bar.death_point.tolist() == [2, 2]
    assert fibered_barcode(I, DiagonalLine((5.0, 0.0))).bars == []


def test_fibered_barcode_matches_scan():
    rng = np.random.default_rng(0)
    L = IntervalModule([(0, 1), (1, 0)], [(2, 3), (3, 2)])
    for z in rng.uniform(-3, 3, size=40):
        l = DiagonalLine((float(z), 0.0))
        ts = np.arange(-5, 5, 1e-3)
        inside = L.contains_many(l.base + ts[:, None], 0.0)
        seg = interval_bar(L, l)
        if not inside.any():
            assert seg is None
            continue
        assert seg is not None
        assert abs(ts[inside].min() - seg[0]) <= 1e-3 and abs(ts[inside].max() - seg[1]) <= 1e-3


def test_raster_examples():
    box = Box(np.zeros(2), np.full(2, 4.0))
    assert not rasterize([], box, 8).values.any()
    A = IntervalModule([(0, 0)], [(2, 2)])
    B = IntervalModule([(1, 1)], [(3, 3)])
    R = rasterize([A, B], box, 8)
    assert R.values.max() == 2
    assert dimension_at([A, B], (1.5, 1.5)) == 2
    assert dimension_at([A, B], (0.5, 0.5)) == 1
    assert dimension_at([A, B], (3.5, 3.5)) == 0
    with pytest.raises(ValueError):
        rasterize([A], box, 0)


def test_raster_coarse_is_subsample_of_fine():
    box = Box(np.zeros(2), np.full(2, 3.0))
    M = fixture_info("fig9_left").truth
    coarse = rasterize(M, box, 10).values
    fine = rasterize(M, box, 30).values
    # Coarse pixel centers coincide with the middle fine pixel of each 3×3 block.
    assert np.array_equal(coarse, fine[1::3, 1::3])


def test_raster_csv_and_json():
    box = Box(np.zeros(2), np.ones(2))
    R = rasterize([IntervalModule([(0, 0)], [(0.5, 1)])], box, 4)
    text = R.to_csv()
    lines = text.splitlines()
    assert lines[:3] == ["# box_low=0.0,0.0", "# box_high=1.0,1.0", "# resolution=4"]
    assert lines[3:] == ["1,1,1,1", "1,1,1,1", "0,0,0,0", "0,0,0,0"]
    doc = json.loads(R.to_json())
    assert doc["shape"] == [4, 4] and sum(doc["values"]) == 8


def test_fig9_rasters_identical():
    box = Box(np.zeros(2), np.full(2, 3.0))
    a = rasterize(fixture_info("fig9_left").truth, box, 100).to_csv()
    b = rasterize(fixture_info("fig9_right").truth, box, 100).to_csv()
    assert a == b


def test_interleaving_identity_and_zero():
    I = IntervalModule([(0, 0)], [(1, 3)])
    assert estimate_interleaving(I, I, resolution=0.01) == 0
    # The longest diagonal segment of R_{a,b} has length min side 1, so d_I(R, 0) = 1/2.
    assert estimate_interleaving(I, [], resolution=0.01) == pytest.approx(0.5, abs=0.01 + 1e-9)
    assert bottleneck_estimate([I], [], resolution=0.01) == pytest.approx(0.5, abs=0.01 + 1e-9)
    assert bottleneck_estimate([I], [I], resolution=0.01) == 0


@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_fig12_half_delta(delta):
    I1, I2 = fig12_pair(delta)
    res = delta / 10
    assert abs(estimate_interleaving(I1, I2, resolution=res) - delta / 2) <= res + 1e-12
    assert abs(bottleneck_estimate([I1], [I2], resolution=res) - delta / 2) <= res + 1e-12


def test_infinite_interval_against_zero_is_infinite():
    Q = IntervalModule([(0, 0)], [(INF, INF)])
    probe = Box(np.full(2, -2.0), np.full(2, 2.0))
    assert estimate_interleaving(Q, [], probe, 0.1) == INF
    assert estimate_interleaving(Q, Q, probe, 0.1) == 0


def test_interleaving_estimate_is_tight_on_probe():
    rng = np.random.default_rng(2)
    res = 0.05
    for _ in range(20):
        I, J = random_interval(rng), random_interval(rng)
        probe = default_probe([I], [J])
        eps = estimate_interleaving(I, J, probe, res)
        if eps == INF or eps == 0:
            continue
        fwd, bwd = _ShiftCheck([I], [J], probe, res), _ShiftCheck([J], [I], probe, res)
        assert fwd.passes(eps) and bwd.passes(eps)
        assert not (fwd.passes(eps - res) and bwd.passes(eps - res))


def test_interleaving_below_bottleneck():
    rng = np.random.default_rng(3)
    for _ in range(15):
        A = [random_interval(rng) for _ in range(int(rng.integers(1, 3)))]
        B = [random_interval(rng) for _ in range(int(rng.integers(1, 3)))]
        probe = default_probe(A, B)
        assert estimate_interleaving(A, B, probe, 0.05) <= bottleneck_estimate(A, B, probe, 0.05) + 1e-12


def test_bottleneck_against_recovered_module():
    fx = fixture_info("well_separated")
    M = approximate_module(fx.complex, None, 0.2, dims=(1,))
    assert bottleneck_estimate(fx.truth, M, resolution=0.02) <= 0.2 + 0.02


def test_point_at_on_rectangle_deathpoint():
    I = IntervalModule([(0, 0)], [(2, 3)])
    seg = interval_bar(I, ORIGIN)
    assert point_at(ORIGIN, seg[1]).tolist() == [2, 2]
