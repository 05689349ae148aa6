"""Interval-decomposable approximation of a multi-filtered complex.

The pipeline walks a δ-grid of diagonal lines, groups bars into summands with
an exact matcher, labels endpoints lying on detected facets, and turns labelled
endpoints into corners whose induced union of rectangles is the output interval.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import FilteredComplex
from .grid import Box, LineGrid, build_grid, snake_positions, surrounding_keys
from .matching import compatibility_match
from .persistence import Bar, Barcode, line_barcode
from .vineyard import VineyardState, advance

log = logging.getLogger(__name__)

INF = math.inf


class CornerAssertionError(RuntimeError):
    """An endpoint outside K carries no facet label."""


def default_tol(delta: float) -> float:
    return max(1e-9, 1e-6 * delta)


@dataclass
class Summand:
    hom_dim: int
    bars: dict[int, Bar] = field(default_factory=dict)

    @property
    def lines(self) -> list[int]:
        return sorted(self.bars)


@dataclass(frozen=True)
class Corner:
    coords: tuple[float, ...]
    kind: str
    codirection: frozenset[int] = frozenset()

    @property
    def point(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


class IntervalModule:
    """Support = {x : c ≤ x ≤ c' for some birth corner c and death corner c'}."""

    def __init__(self, birth_corners: Sequence, death_corners: Sequence, hom_dim: int = 0, n_bars: int = 0):
        self.birth_corners = [_as_corner(c, "birth") for c in birth_corners]
        self.death_corners = [_as_corner(c, "death") for c in death_corners]
        self.hom_dim = hom_dim
        self.n_bars = n_bars
        n = len(self.birth_corners[0].coords) if self.birth_corners else (
            len(self.death_corners[0].coords) if self.death_corners else 0)
        self.births = np.array([c.coords for c in self.birth_corners], dtype=float).reshape(-1, n)
        self.deaths = np.array([c.coords for c in self.death_corners], dtype=float).reshape(-1, n)

    @property
    def n(self) -> int:
        return self.births.shape[1]

    @property
    def is_empty(self) -> bool:
        return len(self.births) == 0 or len(self.deaths) == 0

    def contains_many(self, X: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.is_empty:
            return np.zeros(len(X), dtype=bool)
        up = np.zeros(len(X), dtype=bool)
        for c in self.births:
            up |= np.all(X >= c - tol, axis=1)
        down = np.zeros(len(X), dtype=bool)
        for c in self.deaths:
            down |= np.all(X <= c + tol, axis=1)
        return up & down

    def finite_bounds(self) -> Box | None:
        """Box spanned by the finite corner coordinates, or None if there are none."""
        pts = np.vstack([self.births, self.deaths])
        fin = np.where(np.isfinite(pts), pts, np.nan)
        if np.all(np.isnan(fin)):
            return None
        low = np.nanmin(fin, axis=0)
        high = np.nanmax(fin, axis=0)
        anyval = np.nanmin(fin)
        low = np.where(np.isnan(low), anyval, low)
        high = np.where(np.isnan(high), anyval, high)
        return Box(low, high)

    def __repr__(self):
        return f"IntervalModule(dim={self.hom_dim}, births={self.births.tolist()}, deaths={self.deaths.tolist()})"


def _as_corner(c, kind: str) -> Corner:
    if isinstance(c, Corner):
        return c
    return Corner(tuple(float(v) for v in c), kind)


def support_contains(I: IntervalModule, x, tol: float = 1e-9) -> bool:
    return bool(I.contains_many(np.asarray(x, dtype=float)[None, :], tol)[0])


@dataclass
class ApproxModule:
    intervals: list[IntervalModule]
    delta: float
    box: Box
    n_lines: int
    matcher: str
    n_params: int
    warnings: list[str] = field(default_factory=list)
    transpositions: list[int] = field(default_factory=list)
    summands: list[Summand] = field(default_factory=list, repr=False)


@dataclass
class EndpointLabels:
    births: dict[int, dict[int, float]] = field(default_factory=dict)
    deaths: dict[int, dict[int, float]] = field(default_factory=dict)
    conflicts: dict[tuple[str, int], set[int]] = field(default_factory=dict)

    def add(self, kind: str, line: int, i: int, c: float, tol: float) -> None:
        table = self.births if kind == "birth" else self.deaths
        bad = self.conflicts.setdefault((kind, line), set())
        if i in bad:
            return
        labs = table.setdefault(line, {})
        if i in labs and abs(labs[i] - c) > tol:
            # Two facets of the same codirection claim this endpoint.
            del labs[i]
            bad.add(i)
            return
        labs.setdefault(i, c)

    def of(self, kind: str, line: int) -> dict[int, float]:
        table = self.births if kind == "birth" else self.deaths
        return table.get(line, {})


def _endpoint(bar: Bar, kind: str) -> np.ndarray:
    return bar.birth_point if kind == "birth" else bar.death_point


def label_endpoints(B: Summand, g: LineGrid, tol: float | None = None) -> EndpointLabels:
    tol = default_tol(g.delta) if tol is None else tol
    labels = EndpointLabels()
    full = 2 ** (g.n - 1)
    for p in B.bars:
        S = surrounding_keys(g, p)
        # Sets that are cut by the grid border or by the summand carry no facet evidence.
        if len(S) < full or any(q not in B.bars for q in S) or len(S) < 2:
            continue
        for kind in ("birth", "death"):
            P = np.array([_endpoint(B.bars[q], kind) for q in S])
            if not np.all(np.isfinite(P)):
                continue
            spread = P.max(axis=0) - P.min(axis=0)
            for i in np.flatnonzero(spread <= tol):
                c = float(P[:, i].mean())
                for q in S:
                    labels.add(kind, q, int(i), c, tol)
    return labels


def _merge_labels(groups: Iterable[dict[int, float]], tol: float) -> dict[int, float] | None:
    merged: dict[int, list[float]] = {}
    for labs in groups:
        for i, c in labs.items():
            merged.setdefault(i, []).append(c)
    out = {}
    for i, cs in merged.items():
        if max(cs) - min(cs) > tol:
            return None
        out[i] = float(np.mean(cs))
    return out


def _prune(corners: list[Corner], kind: str, tol: float) -> list[Corner]:
    """Drop duplicates and corners dominated by another corner of the same kind."""
    if not corners:
        return corners
    P = np.array([c.coords for c in corners], dtype=float)
    if kind == "death":
        P = -P
    # below[a, b]: corner b lies below corner a (b dominates a as a birth corner).
    below = np.all(P[None, :, :] <= P[:, None, :] + tol, axis=2)
    keep = []
    for a in range(len(P)):
        dominated = False
        for b in np.flatnonzero(below[a]):
            if b == a:
                continue
            if not below[b, a] or b < a:
                dominated = True
                break
        if not dominated:
            keep.append(corners[a])
    return keep


def compute_corners(
    B: Summand,
    labels: EndpointLabels,
    g: LineGrid,
    K: Box,
    tol: float | None = None,
    strict: bool = True,
    warnings: list[str] | None = None,
) -> tuple[list[Corner], list[Corner]]:
    tol = default_tol(g.delta) if tol is None else tol
    n = g.n
    full = 2 ** (n - 1)
    out: dict[str, list[Corner]] = {"birth": [], "death": []}
    for p in sorted(B.bars):
        grid_set = surrounding_keys(g, p)
        S = [q for q in grid_set if q in B.bars]
        for kind in ("birth", "death"):
            sign = 1.0 if kind == "birth" else -1.0
            P = np.array([_endpoint(B.bars[q], kind) for q in S])
            labs = [labels.of(kind, q) for q in S]
            finite = np.all(np.isfinite(P), axis=1)
            in_K = all(K.contains(x, tol) for x in P)
            if in_K:
                merged = _merge_labels(labs, tol) if all(labs) else None
                if merged:
                    c = (P.min(axis=0) if kind == "birth" else P.max(axis=0)).copy()
                    for i, v in merged.items():
                        c[i] = v
                    out[kind].append(Corner(tuple(c.tolist()), kind, frozenset(merged)))
                else:
                    out[kind].extend(Corner(tuple(x.tolist()), kind) for x in P)
                continue
            if len(grid_set) < full:
                continue
            unlabeled = [q for q, lab, f in zip(S, labs, finite) if f and not lab]
            merged = _merge_labels(labs, tol)
            if unlabeled or merged is None:
                msg = f"unlabeled {kind}point outside K on line {unlabeled[0] if unlabeled else p} at {P[0].tolist()}"
                if strict:
                    raise CornerAssertionError(msg)
                if warnings is not None:
                    warnings.append(msg)
                out[kind].extend(Corner(tuple(x.tolist()), kind) for x in P)
                continue
            # Pseudo corner: labelled coordinates fixed, free ones at the extreme endpoint.
            ext = P.min(axis=0) if kind == "birth" else P.max(axis=0)
            free = [j for j in range(n) if j not in merged]
            # Only pseudo corners whose free coordinates leave K through the open side
            # are minimal; the others lie on facets already covered from inside K.
            if kind == "birth":
                leaves = all(ext[j] < K.low[j] - tol for j in free)
            else:
                leaves = all(ext[j] > K.high[j] + tol for j in free)
            if not leaves:
                continue
            c = np.full(n, -sign * INF)
            for i, v in merged.items():
                c[i] = v
            out[kind].append(Corner(tuple(c.tolist()), kind, frozenset(merged)))
    births = _prune(out["birth"], "birth", tol)
    deaths = _prune(out["death"], "death", tol)
    if B.bars and (not births or not deaths):
        if warnings is not None:
            warnings.append(f"summand with {len(B.bars)} bars produced no corners; using raw endpoints")
        if not births:
            births = _prune([Corner(tuple(b.birth_point.tolist()), "birth") for b in B.bars.values()], "birth", tol)
        if not deaths:
            deaths = _prune([Corner(tuple(b.death_point.tolist()), "death") for b in B.bars.values()], "death", tol)
    return births, deaths


def approximate_interval(
    B: Summand,
    g: LineGrid,
    K: Box,
    tol: float | None = None,
    strict: bool = True,
    warnings: list[str] | None = None,
) -> IntervalModule:
    labels = label_endpoints(B, g, tol)
    births, deaths = compute_corners(B, labels, g, K, tol, strict, warnings)
    return IntervalModule(births, deaths, B.hom_dim, len(B.bars))


def _vineyard_summands(C: FilteredComplex, g: LineGrid, path: list[int], dims: set[int]):
    state = VineyardState.start(C, g.lines[path[0]], path[0])
    summands: dict[int, Summand] = {}
    counts = []

    def collect(bc: Barcode, line: int):
        for bar in bc.bars:
            summands.setdefault(bar.bar_id, Summand(bar.hom_dim)).bars[line] = bar

    collect(state.barcode(dims), path[0])
    for p in path[1:]:
        step = advance(state, g.lines[p], p, dims)
        counts.append(step.transpositions)
        collect(step.match.target, p)
    return list(summands.values()), counts, []


def _lattice_neighbors(g: LineGrid, p: int) -> list[int]:
    key = g.keys[p]
    out = []
    for axis in range(len(key)):
        for step in (-1, 1):
            k = list(key)
            k[axis] += step
            q = g.index.get(tuple(k))
            if q is not None:
                out.append(q)
    return out


def _compatibility_summands(C: FilteredComplex, g: LineGrid, path: list[int], dims: set[int], delta: float, tol: float):
    codes = {p: line_barcode(C, g.lines[p], dims, p) for p in path}
    owner: dict[tuple[int, int], int] = {}
    summands: list[Summand | None] = []
    alias: list[int] = []
    warnings: list[str] = []

    def find(k: int) -> int:
        while alias[k] != k:
            alias[k] = alias[alias[k]]
            k = alias[k]
        return k

    visited: set[int] = set()
    prev = None
    for p in path:
        nbrs = [q for q in _lattice_neighbors(g, p) if q in visited]
        if prev in nbrs:
            nbrs.remove(prev)
            nbrs.insert(0, prev)
        claims: dict[int, list[int]] = {}
        for q in nbrs:
            m = compatibility_match(codes[q], codes[p], delta, tol)
            if m.flagged:
                warnings.append(
                    f"ambiguous compatibility match between lines {q} and {p}: "
                    f"{len(m.ambiguous)} ambiguous, {len(m.ill_defined)} long bars unmatched"
                )
            for i, j in m.pairs.items():
                claims.setdefault(j, []).append(find(owner[(q, i)]))
        for j, bar in enumerate(codes[p].bars):
            target = None
            for k in claims.get(j, []):
                k = find(k)
                if p not in summands[k].bars:
                    if target is None:
                        target = k
                    elif k != target and not (summands[k].bars.keys() & summands[target].bars.keys()):
                        summands[target].bars.update(summands[k].bars)
                        summands[k] = None
                        alias[k] = target
            if target is None:
                target = len(summands)
                summands.append(Summand(bar.hom_dim))
                alias.append(target)
            summands[target].bars[p] = bar
            owner[(p, j)] = target
        visited.add(p)
        prev = p
    return [s for s in summands if s is not None], [], warnings


def approximate_module(
    C: FilteredComplex,
    K: Box | None,
    delta: float,
    matcher: str = "vineyard",
    dims: Iterable[int] = (0,),
    tol: float | None = None,
    strict: bool = True,
) -> ApproxModule:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    K = C.bounding_box() if K is None else K
    tol = default_tol(delta) if tol is None else tol
    dims = set(dims)
    g = build_grid(K, delta)
    path = snake_positions(g)
    if matcher == "vineyard":
        summands, counts, warnings = _vineyard_summands(C, g, path, dims)
    elif matcher == "compatibility":
        summands, counts, warnings = _compatibility_summands(C, g, path, dims, delta, tol)
    else:
        raise ValueError(f"unknown matcher {matcher!r}")
    summands = [s for s in summands if s.bars]
    summands.sort(key=lambda s: (s.hom_dim, min(s.bars)))
    intervals = [approximate_interval(s, g, K, tol, strict, warnings) for s in summands]
    if counts:
        log.debug("transpositions per step: max %d, total %d", max(counts), sum(counts))
    return ApproxModule(intervals, delta, K, len(g), matcher, C.n_params, warnings, counts, summands)
