"""Persistence along one diagonal line: ordering, F2 reduction, barcodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import FilteredComplex
from .grid import DiagonalLine, push_many

INF = math.inf


def order_simplices(C: FilteredComplex, l: DiagonalLine) -> tuple[np.ndarray, np.ndarray]:
    """Simplex ids sorted by (push value, dim, id), and the push value of every simplex."""
    values = push_many(l.base, C.grades) if len(C) else np.zeros(0)
    order = np.lexsort((np.arange(len(C)), C.dims, values))
    return order, values


class ReducedMatrix:
    """R = D·V over F2 with R reduced, columns keyed by simplex id.

    ``R[s]`` and ``V[s]`` are sets of simplex ids. ``low[s]`` is the row (a
    simplex id) of the lowest entry of a nonzero column and ``owner`` is its
    inverse. ``V`` is the change-of-basis record: ``V[s]`` is the chain whose
    boundary is ``R[s]``.
    """

    def __init__(self, C: FilteredComplex, order: Sequence[int]):
        self.complex = C
        self.order = [int(s) for s in order]
        self.pos = [0] * len(self.order)
        for i, s in enumerate(self.order):
            self.pos[s] = i
        self.R: dict[int, set[int]] = {}
        self.V: dict[int, set[int]] = {}
        self.low: dict[int, int] = {}
        self.owner: dict[int, int] = {}

    def lowest(self, col: set[int]) -> int:
        return max(col, key=self.pos.__getitem__)

    def is_positive(self, s: int) -> bool:
        return not self.R[s]

    def partner(self, s: int) -> int | None:
        """The simplex paired with s, or None when s is essential."""
        if s in self.low:
            return self.low[s]
        return self.owner.get(s)

    def pairs(self) -> list[tuple[int, int | None]]:
        """(birth, death) simplex pairs; death is None for essential classes."""
        out = []
        for s in self.order:
            if not self.R[s]:
                out.append((s, self.owner.get(s)))
        return out

    def partition(self) -> dict[int, str]:
        """Tag each simplex E (essential), B (paired birth) or D (paired death)."""
        tags = {}
        for s in self.order:
            if self.R[s]:
                tags[s] = "D"
            else:
                tags[s] = "B" if s in self.owner else "E"
        return tags

    def check(self) -> None:
        """Assert the reduced-matrix invariants. Meant for tests."""
        facets = [set(sm.facets) for sm in self.complex.simplices]
        seen = {}
        for s in self.order:
            col = self.R[s]
            boundary: set[int] = set()
            for v in self.V[s]:
                boundary ^= facets[v]
                assert self.pos[v] <= self.pos[s], "V is not upper triangular"
            assert s in self.V[s]
            assert boundary == col, "R != D V"
            if col:
                lo = self.lowest(col)
                assert self.low[s] == lo and self.owner[lo] == s
                assert lo not in seen, "two columns share a low"
                assert not self.R[lo], "a low row has a nonzero column"
                seen[lo] = s
            else:
                assert s not in self.low


def reduce(C: FilteredComplex, order: Sequence[int]) -> ReducedMatrix:
    """Standard left-to-right column reduction over F2."""
    M = ReducedMatrix(C, order)
    pos = M.pos.__getitem__
    for s in M.order:
        col = set(C.simplices[s].facets)
        chain = {s}
        while col:
            lo = max(col, key=pos)
            other = M.owner.get(lo)
            if other is None:
                M.low[s] = lo
                M.owner[lo] = s
                break
            col ^= M.R[other]
            chain ^= M.V[other]
        M.R[s] = col
        M.V[s] = chain
    return M


@dataclass
class Bar:
    line: int
    birth_t: float
    death_t: float
    birth_point: np.ndarray
    death_point: np.ndarray
    hom_dim: int
    column_id: int
    bar_id: int = -1

    @property
    def length(self) -> float:
        return self.death_t - self.birth_t

    def __repr__(self):
        return f"Bar(dim={self.hom_dim}, [{self.birth_t:.6g}, {self.death_t:.6g}], line={self.line}, id={self.bar_id})"


@dataclass
class Barcode:
    line: int
    bars: list[Bar] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def in_dim(self, d: int) -> list[Bar]:
        return [b for b in self.bars if b.hom_dim == d]

    def intervals(self, d: int | None = None) -> list[tuple[float, float]]:
        """Sorted (birth_t, death_t) pairs, optionally for one degree."""
        return sorted((b.birth_t, b.death_t) for b in self.bars if d is None or b.hom_dim == d)


def make_bar(line_id: int, base: np.ndarray, birth_t: float, death_t: float, dim: int, column: int, bar_id: int = -1) -> Bar:
    n = base.shape[0]
    bp = np.full(n, birth_t) if math.isinf(birth_t) else base + birth_t
    dp = np.full(n, death_t) if math.isinf(death_t) else base + death_t
    return Bar(line_id, birth_t, death_t, bp, dp, dim, column, bar_id)


def barcode(
    R: ReducedMatrix,
    values: np.ndarray,
    l: DiagonalLine,
    dims: Iterable[int] | None = None,
    line_id: int = -1,
    ids: dict[int, int] | None = None,
) -> Barcode:
    """Nontrivial bars of the pairing; ``ids`` maps birth simplex to a bar id."""
    wanted = None if dims is None else set(dims)
    dim_of = R.complex.dims
    base = l.base
    out = Barcode(line_id)
    for b, d in R.pairs():
        k = int(dim_of[b])
        if wanted is not None and k not in wanted:
            continue
        bt = float(values[b])
        dt = INF if d is None else float(values[d])
        if bt == dt:
            continue
        out.bars.append(make_bar(line_id, base, bt, dt, k, b, b if ids is None else ids[b]))
    return out


def line_barcode(C: FilteredComplex, l: DiagonalLine, dims: Iterable[int] | None = None, line_id: int = -1) -> Barcode:
    """Barcode of C restricted to l, reduced from scratch."""
    order, values = order_simplices(C, l)
    return barcode(reduce(C, order), values, l, dims, line_id)
