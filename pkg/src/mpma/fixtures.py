"""Hand-built bifiltered complexes with known decompositions.

Bounded summands live in degree 1 and come from small gadgets:

* ``rectangle``: a hollow triangle born at a, filled by a 2-simplex at
  (b1, a2) and by a cone at (a1, b2); a 3-simplex at b kills the sphere the two
  fillings make. Its degree-1 module is the rectangle [a, b).
* ``staircase``: two cycles sharing a path, born at two incomparable grades
  and identified at their join; each is filled at its own far grade. Its
  degree-1 module is the union of the two quadrants cut off by the fillings.

Unbounded summands (quadrants and their unions) live in degree 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .approximation import IntervalModule
from .complex import ComplexBuilder, ComplexError, FilteredComplex

INF = float("inf")


@dataclass
class Fixture:
    name: str
    complex: FilteredComplex
    dims: tuple[int, ...]
    truth: list[IntervalModule] | None
    note: str = ""
    rectangles: list[tuple[tuple[float, ...], tuple[float, ...]]] = field(default_factory=list)


def add_rectangle(B: ComplexBuilder, tag: str, a: Sequence[float], b: Sequence[float]) -> None:
    a1, a2 = a
    b1, b2 = b
    x, y, z, c = (f"{tag}.{v}" for v in "xyzc")
    for v in (x, y, z):
        B.add([v], a)
    for e in ((x, y), (y, z), (x, z)):
        B.add(e, a)
    B.add([c], (a1, b2))
    for v in (x, y, z):
        B.add([c, v], (a1, b2))
    for e in ((x, y), (y, z), (x, z)):
        B.add([c, *e], (a1, b2))
    B.add([x, y, z], (b1, a2))
    B.add([c, x, y, z], b)


def add_staircase(B: ComplexBuilder, tag: str, g1: Sequence[float], g2: Sequence[float],
                  far1: Sequence[float], far2: Sequence[float]) -> None:
    """Degree-1 summand born at g1 or g2, killed at far1 (cycle of g1) or far2 (cycle of g2)."""
    x, y, z, w = (f"{tag}.{v}" for v in "xyzw")
    root = np.minimum(g1, g2)
    for v in (x, y, z):
        B.add([v], root)
    B.add([x, y], root)
    B.add([y, z], root)
    B.add([x, z], g1)
    B.add([w], g2)
    B.add([z, w], g2)
    B.add([x, w], g2)
    B.add([x, z, w], np.maximum(g1, g2))
    B.add([x, y, z], far1)
    B.add([y, w], far2)
    B.add([x, y, w], far2)
    B.add([y, z, w], far2)


def _interval(births, deaths, dim) -> IntervalModule:
    return IntervalModule([tuple(b) for b in births], [tuple(d) for d in deaths], dim)


def rectangle_fixture(rects, name: str = "rectangles") -> Fixture:
    B = ComplexBuilder(2)
    truth = []
    for k, (a, b) in enumerate(rects):
        add_rectangle(B, f"r{k}", a, b)
        truth.append(_interval([a], [b], 1))
    return Fixture(name, B.build(), (1,), truth, rectangles=[(tuple(a), tuple(b)) for a, b in rects])


def _fig8_left() -> Fixture:
    B = ComplexBuilder(2)
    B.add(["u"], (0, 1))
    B.add(["w"], (1, 0))
    B.add(["z"], (1, 1))
    B.add(["u", "w"], (1, 1))
    truth = [
        _interval([(0, 1), (1, 0)], [(INF, INF)], 0),
        _interval([(1, 1)], [(INF, INF)], 0),
    ]
    return Fixture("fig8_left", B.build(), (0,), truth, "union of two quadrants plus the quadrant at their join")


def _fig8_right() -> Fixture:
    B = ComplexBuilder(2)
    B.add(["u"], (0, 1))
    B.add(["w"], (1, 0))
    truth = [
        _interval([(0, 1)], [(INF, INF)], 0),
        _interval([(1, 0)], [(INF, INF)], 0),
    ]
    return Fixture("fig8_right", B.build(), (0,), truth, "two overlapping quadrants")


def _fig9_left() -> Fixture:
    B = ComplexBuilder(2)
    add_staircase(B, "s", (0, 1), (1, 0), (0, 3), (3, 0))
    add_rectangle(B, "r", (1, 1), (3, 3))
    truth = [
        _interval([(0, 1), (1, 0)], [(3, 3)], 1),
        _interval([(1, 1)], [(3, 3)], 1),
    ]
    return Fixture("fig9_left", B.build(), (1,), truth, "staircase summand plus the square at its join")


def _fig9_right() -> Fixture:
    B = ComplexBuilder(2)
    add_rectangle(B, "h", (0, 1), (3, 3))
    add_rectangle(B, "v", (1, 0), (3, 3))
    truth = [
        _interval([(0, 1)], [(3, 3)], 1),
        _interval([(1, 0)], [(3, 3)], 1),
    ]
    return Fixture("fig9_right", B.build(), (1,), truth, "two rectangles overlapping in a square")


def _fig10() -> Fixture:
    B = ComplexBuilder(2)
    B.add(["g"], (0, 1))
    B.add(["h"], (1, 0))
    B.add(["g", "h"], (2, 1))
    return Fixture("fig10_indecomposable", B.build(), (0,), None,
                   "two generators identified away from their join; not interval decomposable")


def _nested_squares() -> Fixture:
    fx = rectangle_fixture([((0, 0), (4, 4)), ((0, 2), (2, 4))], "nested_squares")
    fx.note = "a square sharing its top-left corner region with a larger square; many lines see equal bars"
    return fx


def _well_separated() -> Fixture:
    fx = rectangle_fixture([((0, 0), (1.5, 1.0)), ((1.0, 2.0), (2.5, 3.0))], "well_separated")
    fx.note = "two rectangles whose endpoints stay far apart on every line"
    return fx


def _constant() -> Fixture:
    B = ComplexBuilder(2)
    for v in "abc":
        B.add([v], (0.5, 0.5))
    for e in ("ab", "bc", "ac"):
        B.add(list(e), (0.5, 0.5))
    truth = [_interval([(0.5, 0.5)], [(INF, INF)], 0), _interval([(0.5, 0.5)], [(INF, INF)], 1)]
    return Fixture("constant", B.build(), (0, 1), truth, "hollow triangle at a single grade")


_FIXTURES = {
    "fig8_left": _fig8_left,
    "fig8_right": _fig8_right,
    "fig9_left": _fig9_left,
    "fig9_right": _fig9_right,
    "fig10_indecomposable": _fig10,
    "nested_squares": _nested_squares,
    "well_separated": _well_separated,
    "constant": _constant,
}

FIXTURE_NAMES = tuple(_FIXTURES)


def fixture_info(name: str) -> Fixture:
    try:
        return _FIXTURES[name]()
    except KeyError:
        raise ComplexError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}") from None


def fixture(name: str) -> FilteredComplex:
    return fixture_info(name).complex


def fig12_pair(delta: float) -> tuple[IntervalModule, IntervalModule]:
    """Two anti-diagonal squares of side δ/2 against the square [0, δ]^2."""
    h = delta / 2
    I1 = _interval([(0, h), (h, 0)], [(h, delta), (delta, h)], 0)
    I2 = _interval([(0, 0)], [(delta, delta)], 0)
    return I1, I2


def random_rectangles(rng: np.random.Generator, k: int, lo: float = 0.0, hi: float = 1.0,
                      min_side: float = 0.05, max_side: float = 0.6, separation: float = 0.0,
                      max_tries: int = 10_000) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """k random rectangles in [lo, hi]^2; with separation > 0 every pair of corner
    coordinates in the same axis differs by more than separation."""
    rects: list[tuple[tuple[float, float], tuple[float, float]]] = []
    tries = 0
    while len(rects) < k:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place rectangles with the requested separation")
        a = rng.uniform(lo, hi - min_side, size=2)
        side = rng.uniform(min_side, max_side, size=2)
        b = np.minimum(a + side, hi)
        if np.any(b - a < min_side):
            continue
        cand = (tuple(float(v) for v in a), tuple(float(v) for v in b))
        if separation > 0 and not all(_separated(cand, r, separation) for r in rects):
            continue
        rects.append(cand)
    return rects


def _separated(r1, r2, sep: float) -> bool:
    for axis in range(2):
        vals1 = (r1[0][axis], r1[1][axis])
        vals2 = (r2[0][axis], r2[1][axis])
        if any(abs(u - v) <= sep for u in vals1 for v in vals2):
            return False
    return True
