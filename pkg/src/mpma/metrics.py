"""Geometry and distances for interval modules given by corners.

Distances are estimates on a probe grid. The interleaving check compares, at
every probe point x, the rank of M(x → x+2ε) with the dimension of N(x+ε); for
a pair of intervals this is exactly the pointwise test that the shift
morphisms between the two indicator modules compose to the identity.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .approximation import ApproxModule, IntervalModule
from .grid import Box, DiagonalLine
from .persistence import Barcode, make_bar

INF = math.inf
MEMBERSHIP_TOL = 1e-9


def recthull(points) -> Box:
    P = np.atleast_2d(np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float))
    if P.size == 0:
        raise ValueError("recthull of an empty set")
    return Box(P.min(axis=0), P.max(axis=0))


def _intervals(M) -> list[IntervalModule]:
    if isinstance(M, IntervalModule):
        return [M]
    if isinstance(M, ApproxModule):
        return list(M.intervals)
    return list(M)


def interval_bar(I: IntervalModule, l: DiagonalLine, tol: float = MEMBERSHIP_TOL) -> tuple[float, float] | None:
    """(birth_t, death_t) of the support of I along l, or None if they miss."""
    if I.is_empty:
        return None
    p = l.base
    tb = np.max(I.births - p, axis=1)
    td = np.min(I.deaths - p, axis=1)
    valid = tb[:, None] <= td[None, :] + tol
    if not valid.any():
        return None
    birth = float(tb[valid.any(axis=1)].min())
    death = float(td[valid.any(axis=0)].max())
    return birth, death


def fibered_barcode(M, l: DiagonalLine, dims: Iterable[int] | None = None, line_id: int = -1,
                    min_length: float = 0.0) -> Barcode:
    wanted = None if dims is None else set(dims)
    out = Barcode(line_id)
    for k, I in enumerate(_intervals(M)):
        if wanted is not None and I.hom_dim not in wanted:
            continue
        seg = interval_bar(I, l)
        if seg is None or seg[1] - seg[0] <= min_length:
            continue
        out.bars.append(make_bar(line_id, l.base, seg[0], seg[1], I.hom_dim, k, k))
    return out


def dimension_many(M, X: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    total = np.zeros(len(X), dtype=np.int64)
    for I in _intervals(M):
        total += I.contains_many(X, tol)
    return total


def dimension_at(M, x) -> int:
    return int(dimension_many(M, np.asarray(x, dtype=float)[None, :])[0])


@dataclass
class Raster:
    box: Box
    resolution: int
    values: np.ndarray

    def centers(self, axis: int) -> np.ndarray:
        return pixel_centers(self.box, self.resolution)[axis]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# box_low={','.join(repr(float(v)) for v in self.box.low)}\n")
        buf.write(f"# box_high={','.join(repr(float(v)) for v in self.box.high)}\n")
        buf.write(f"# resolution={self.resolution}\n")
        flat = self.values.reshape(-1, self.resolution) if self.values.ndim > 1 else self.values[None, :]
        for row in flat:
            buf.write(",".join(str(int(v)) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "box": {"low": self.box.low.tolist(), "high": self.box.high.tolist()},
            "resolution": self.resolution,
            "shape": list(self.values.shape),
            "values": self.values.reshape(-1).astype(int).tolist(),
        }
        return json.dumps(doc, sort_keys=True)


def pixel_centers(box: Box, resolution: int) -> list[np.ndarray]:
    step = (box.high - box.low) / resolution
    return [box.low[i] + (np.arange(resolution) + 0.5) * step[i] for i in range(box.n)]


def rasterize(M, box: Box, resolution: int) -> Raster:
    """Pointwise dimension at pixel centers; values[i1, ..., in] indexes axes in order."""
    if resolution < 1:
        raise ValueError("resolution must be at least 1")
    axes = pixel_centers(box, resolution)
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.reshape(-1) for m in mesh], axis=1)
    values = dimension_many(M, X).reshape((resolution,) * box.n)
    return Raster(box, resolution, values)


def default_probe(M1, M2) -> Box | None:
    """Union of the finite corner boxes, inflated by the larger diameter."""
    boxes = [b for I in _intervals(M1) + _intervals(M2) if (b := I.finite_bounds()) is not None]
    if not boxes:
        return None
    low = np.min([b.low for b in boxes], axis=0)
    high = np.max([b.high for b in boxes], axis=0)
    diam = 0.0
    for M in (M1, M2):
        bs = [b for I in _intervals(M) if (b := I.finite_bounds()) is not None]
        if bs:
            lo = np.min([b.low for b in bs], axis=0)
            hi = np.max([b.high for b in bs], axis=0)
            diam = max(diam, float(np.max(hi - lo)))
    return Box(low - diam, high + diam)


def probe_points(probe: Box, resolution: float, within: tuple[np.ndarray, np.ndarray] | None = None) -> np.ndarray:
    """Lattice points low + k·resolution of the probe box, optionally only those inside ``within``."""
    axes = []
    for i, (lo, hi) in enumerate(zip(probe.low, probe.high)):
        k = int(math.floor((hi - lo) / resolution + 1e-9))
        a, b = 0, k
        if within is not None:
            wlo, whi = within[0][i], within[1][i]
            if wlo > lo:
                a = int(math.ceil((wlo - lo) / resolution - 1e-9))
            if whi < hi:
                b = int(math.floor((whi - lo) / resolution + 1e-9))
        if b < a:
            return np.zeros((0, probe.n))
        axes.append(lo + resolution * np.arange(a, b + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


class _ShiftCheck:
    """Pointwise interleaving test of M against N at a fixed probe set."""

    def __init__(self, M: list[IntervalModule], N: list[IntervalModule], probe: Box, resolution: float):
        self.M, self.N = M, N
        M = [I for I in M if not I.is_empty]
        self.M = M
        if M:
            low = np.min([I.births.min(axis=0) for I in M], axis=0)
            high = np.max([I.deaths.max(axis=0) for I in M], axis=0)
            X = probe_points(probe, resolution, (low, high))
        else:
            X = np.zeros((0, probe.n))
        inside = [I.contains_many(X, MEMBERSHIP_TOL) for I in M]
        keep = np.any(inside, axis=0) if inside else np.zeros(len(X), dtype=bool)
        self.X = X[keep]
        self.inside = [m[keep] for m in inside]

    def passes(self, eps: float) -> bool:
        if len(self.X) == 0:
            return True
        rank = np.zeros(len(self.X), dtype=np.int64)
        for I, m in zip(self.M, self.inside):
            rank += m & I.contains_many(self.X + 2 * eps, MEMBERSHIP_TOL)
        active = rank > 0
        if not active.any():
            return True
        dim = dimension_many(self.N, self.X[active] + eps)
        return bool(np.all(rank[active] <= dim))


def _smallest_step(passes, cap_steps: int) -> int | None:
    """Smallest k found by galloping then bisection with passes(k) and not passes(k-1)."""
    if passes(0):
        return 0
    lo, hi = 0, 1
    while not passes(hi):
        lo = hi
        if hi >= cap_steps:
            return None
        hi = min(2 * hi, cap_steps)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def estimate_interleaving(I1, I2, probe: Box | None = None, resolution: float = 0.01,
                          cap: float | None = None) -> float:
    """Interleaving distance estimate on the probe grid; inf if none up to cap.

    I1 and I2 may be intervals, modules, or lists of intervals; an empty list is the zero module.
    """
    A, B = _intervals(I1), _intervals(I2)
    if probe is None:
        probe = default_probe(A, B)
        if probe is None:
            return 0.0
    forward, backward = _ShiftCheck(A, B, probe, resolution), _ShiftCheck(B, A, probe, resolution)
    if cap is None:
        cap = float(np.max(probe.high - probe.low))
    cap_steps = max(1, int(math.ceil(cap / resolution - 1e-9)))
    k = _smallest_step(lambda k: forward.passes(k * resolution) and backward.passes(k * resolution), cap_steps)
    return INF if k is None else k * resolution


def _feasible(cost: np.ndarray, c1: np.ndarray, c2: np.ndarray, theta: float) -> bool:
    m, n = cost.shape
    rows, cols = [], []
    for i in range(m):
        for j in range(n):
            if cost[i, j] <= theta:
                rows.append(i)
                cols.append(j)
        if c1[i] <= theta:
            rows.append(i)
            cols.append(n + i)
    for j in range(n):
        if c2[j] <= theta:
            rows.append(m + j)
            cols.append(j)
        for i in range(m):
            rows.append(m + j)
            cols.append(n + i)
    size = m + n
    if size == 0:
        return True
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_estimate(M1, M2, probe: Box | None = None, resolution: float = 0.01) -> float:
    A, B = _intervals(M1), _intervals(M2)
    if probe is None:
        probe = default_probe(A, B)
        if probe is None:
            return 0.0
    c1 = np.array([estimate_interleaving([I], [], probe, resolution) for I in A])
    c2 = np.array([estimate_interleaving([], [J], probe, resolution) for J in B])
    cost = np.full((len(A), len(B)), INF)
    for i, I in enumerate(A):
        for j, J in enumerate(B):
            if I.hom_dim != J.hom_dim:
                continue
            # Matching above both zero-module costs never beats leaving both unmatched.
            cap = max(c1[i], c2[j])
            cost[i, j] = estimate_interleaving([I], [J], probe, resolution,
                                               cap=None if math.isinf(cap) else cap)
    thresholds = np.unique(np.concatenate([cost.reshape(-1), c1, c2, [0.0]]))
    thresholds = thresholds[np.isfinite(thresholds)]
    lo, hi = 0, len(thresholds) - 1
    if not _feasible(cost, c1, c2, thresholds[hi]):
        return INF
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(cost, c1, c2, thresholds[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(thresholds[lo])
