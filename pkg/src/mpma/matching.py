"""Bar matchings between consecutive lines and the compatibility matcher."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .persistence import Bar, Barcode

DEFAULT_TOL = 1e-9


@dataclass
class BarMatch:
    """Partial injective map from source bars to target bars, by index."""

    source: Barcode
    target: Barcode
    pairs: dict[int, int] = field(default_factory=dict)
    unmatched_to_empty: set[int] = field(default_factory=set)
    ambiguous: set[int] = field(default_factory=set)
    ill_defined: set[int] = field(default_factory=set)

    @property
    def flagged(self) -> bool:
        return bool(self.ambiguous or self.ill_defined)

    def image(self, i: int) -> Bar | None:
        j = self.pairs.get(i)
        return None if j is None else self.target.bars[j]


def _gap(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """y - x with the convention inf - inf = 0."""
    with np.errstate(invalid="ignore"):
        return np.where(x == y, 0.0, y - x)


def flat_or_empty(x: np.ndarray, y: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Whether the rectangle R_{x,y} is empty or has a side of zero length."""
    return bool(np.any(_gap(x, y) <= tol))


def compatible(b1: Bar, b2: Bar, delta: float | None = None, tol: float = DEFAULT_TOL) -> bool:
    """Bars on consecutive lines are compatible when their endpoint rectangles are flat.

    delta is accepted for symmetry with compatible_with_empty; flatness does not depend on it.
    """
    return (
        flat_or_empty(b1.birth_point, b2.birth_point, tol)
        and flat_or_empty(b2.birth_point, b1.birth_point, tol)
        and flat_or_empty(b1.death_point, b2.death_point, tol)
        and flat_or_empty(b2.death_point, b1.death_point, tol)
    )


def compatible_with_empty(b: Bar, delta: float, tol: float = DEFAULT_TOL) -> bool:
    size = np.max(np.abs(_gap(b.birth_point, b.death_point)))
    return bool(size <= 2 * delta + tol)


def displacement(b1: Bar, b2: Bar) -> float:
    return float(
        max(
            np.max(np.abs(_gap(b1.birth_point, b2.birth_point))),
            np.max(np.abs(_gap(b1.death_point, b2.death_point))),
        )
    )


def compatibility_match(B1: Barcode, B2: Barcode, delta: float, tol: float = DEFAULT_TOL) -> BarMatch:
    m = BarMatch(B1, B2)
    cands: dict[int, list[int]] = {}
    for i, b1 in enumerate(B1.bars):
        cands[i] = [j for j, b2 in enumerate(B2.bars) if b1.hom_dim == b2.hom_dim and compatible(b1, b2, delta, tol)]

    taken: dict[int, int] = {}
    # Unique partners first, so tie-breaking cannot steal them.
    for i, js in cands.items():
        if len(js) == 1:
            j = js[0]
            if j in taken:
                m.ambiguous.add(i)
                m.ambiguous.add(taken[j])
                continue
            taken[j] = i
            m.pairs[i] = j
    for i, js in cands.items():
        if len(js) <= 1:
            continue
        m.ambiguous.add(i)
        free = [j for j in js if j not in taken]
        if free:
            j = min(free, key=lambda j: (displacement(B1.bars[i], B2.bars[j]), j))
            taken[j] = i
            m.pairs[i] = j
    for i, b1 in enumerate(B1.bars):
        if i in m.pairs:
            continue
        m.unmatched_to_empty.add(i)
        if not compatible_with_empty(b1, delta, tol):
            m.ill_defined.add(i)
    return m
