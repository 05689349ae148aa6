"""Diagonal lines, boxes and δ-grids of lines.

A diagonal line has direction (1, ..., 1) and is stored by its basepoint on the
hyperplane x_n = 0. A δ-grid is a lattice of such basepoints with spacing δ,
anchored at the projection of the low corner of the box it fills.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

INF = math.inf


@dataclass(frozen=True)
class Box:
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        low = np.asarray(self.low, dtype=float).reshape(-1)
        high = np.asarray(self.high, dtype=float).reshape(-1)
        if low.shape != high.shape:
            raise ValueError("box corners must have the same dimension")
        if np.any(low > high):
            raise ValueError(f"box low {low} is not below high {high}")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def n(self) -> int:
        return self.low.shape[0]

    def offset(self, r: float) -> "Box":
        return Box(self.low - r, self.high + r)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.low - tol) and np.all(x <= self.high + tol))

    def __eq__(self, other):
        return isinstance(other, Box) and np.array_equal(self.low, other.low) and np.array_equal(self.high, other.high)

    def __hash__(self):
        return hash((tuple(self.low), tuple(self.high)))

    def __repr__(self):
        return f"Box(low={self.low.tolist()}, high={self.high.tolist()})"


@dataclass(frozen=True)
class DiagonalLine:
    basepoint: tuple[float, ...]

    @classmethod
    def through(cls, x: Sequence[float]) -> "DiagonalLine":
        """The diagonal line through x, in canonical form."""
        x = np.asarray(x, dtype=float)
        return cls(tuple((x - x[-1]).tolist()))

    @property
    def base(self) -> np.ndarray:
        return np.asarray(self.basepoint, dtype=float)

    @property
    def n(self) -> int:
        return len(self.basepoint)


def push(l: DiagonalLine, x) -> float:
    """Parameter of the smallest point of l that dominates x."""
    return float(np.max(np.asarray(x, dtype=float) - l.base))


def push_many(base: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Row-wise push of the points X onto the line with basepoint base."""
    return np.max(X - base, axis=1)


def point_at(l: DiagonalLine, t: float) -> np.ndarray:
    if t == INF or t == -INF:
        return np.full(l.n, t)
    return l.base + t


def distance_to_line(l: DiagonalLine, x) -> float:
    """ℓ∞ distance from x to l."""
    w = np.asarray(x, dtype=float) - l.base
    return float((w.max() - w.min()) / 2.0)


@dataclass
class LineGrid:
    box: Box
    delta: float
    anchor: np.ndarray
    shape: tuple[int, ...]
    offset: tuple[int, ...]
    lines: list[DiagonalLine] = field(default_factory=list)
    keys: list[tuple[int, ...]] = field(default_factory=list)
    index: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.lines)

    @property
    def n(self) -> int:
        return self.box.n

    def position(self, l: DiagonalLine | int) -> int:
        if isinstance(l, (int, np.integer)):
            return int(l)
        key = self.key_of(l)
        if key is None or key not in self.index:
            raise KeyError(f"line {l.basepoint} is not in the grid")
        return self.index[key]

    def key_of(self, l: DiagonalLine) -> tuple[int, ...] | None:
        z = (l.base[:-1] - self.anchor) / self.delta
        k = np.rint(z)
        if np.any(np.abs(z - k) > 1e-6):
            return None
        return tuple(int(v) for v in k)

    def basepoints(self) -> np.ndarray:
        return np.array([l.basepoint for l in self.lines], dtype=float).reshape(len(self.lines), self.n)


def build_grid(K: Box, delta: float) -> LineGrid:
    """δ-grid of diagonal lines filling K^{2δ}, with one spare layer per side."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    n = K.n
    big = K.offset(2 * delta)
    if n == 1:
        # Every point of R lies on the unique diagonal line.
        line = DiagonalLine((0.0,))
        return LineGrid(big, delta, np.zeros(0), (), (), [line], [()], {(): 0})
    # Projection along 1 onto {x_n = 0}: z_i = x_i - x_n.
    zmin = big.low[:-1] - big.high[-1]
    zmax = big.high[:-1] - big.low[-1]
    anchor = big.low[:-1] - big.low[-1]
    kmin = np.floor((zmin - anchor) / delta + 1e-9).astype(int) - 1
    kmax = np.ceil((zmax - anchor) / delta - 1e-9).astype(int) + 1
    shape = tuple(int(v) for v in (kmax - kmin + 1))
    grid = LineGrid(big, delta, anchor, shape, tuple(int(v) for v in kmin))
    for key in itertools.product(*(range(a, b + 1) for a, b in zip(kmin, kmax))):
        z = anchor + delta * np.asarray(key, dtype=float)
        grid.index[key] = len(grid.lines)
        grid.keys.append(key)
        grid.lines.append(DiagonalLine(tuple(z.tolist()) + (0.0,)))
    return grid


def surrounding_keys(g: LineGrid, pos: int) -> list[int]:
    """Positions of the surrounding set of the line at pos (itself first)."""
    key = g.keys[pos]
    out = []
    for u in itertools.product((0, 1), repeat=len(key)):
        k = tuple(a + b for a, b in zip(key, u))
        if k in g.index:
            out.append(g.index[k])
    return out


def surrounding_set(g: LineGrid, l: DiagonalLine | int) -> list[DiagonalLine]:
    return [g.lines[p] for p in surrounding_keys(g, g.position(l))]


def _lattice_offset(l1: DiagonalLine, l2: DiagonalLine) -> np.ndarray:
    # Both basepoints already sit on x_n = 0, so the offset is re-aligned along 1.
    return l2.base[:-1] - l1.base[:-1]


def consecutive(l1: DiagonalLine, l2: DiagonalLine, delta: float, tol: float = 1e-9) -> bool:
    d = _lattice_offset(l1, l2) / delta
    k = np.rint(d)
    if np.any(np.abs(d - k) > tol) or not np.any(k):
        return False
    return bool(np.all((k == 0) | (k == 1)) or np.all((k == 0) | (k == -1)))


def comparable(l1: DiagonalLine, l2: DiagonalLine, delta: float, tol: float = 1e-9) -> bool:
    d = _lattice_offset(l1, l2)
    spread = max(0.0, float(d.max(initial=0.0))) - min(0.0, float(d.min(initial=0.0)))
    return spread <= delta + tol


def _boustrophedon(shape: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not shape:
        yield ()
        return
    inner = list(_boustrophedon(shape[:-1]))
    for j in range(shape[-1]):
        seq = inner if j % 2 == 0 else reversed(inner)
        for k in seq:
            yield k + (j,)


def snake_positions(g: LineGrid) -> list[int]:
    """Grid positions in boustrophedon order, axis 0 varying fastest."""
    out = []
    for k in _boustrophedon(g.shape):
        key = tuple(a + b for a, b in zip(k, g.offset))
        out.append(g.index[key])
    return out


def snake_order(g: LineGrid) -> list[DiagonalLine]:
    return [g.lines[p] for p in snake_positions(g)]
