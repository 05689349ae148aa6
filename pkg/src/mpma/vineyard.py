"""Vineyard updates: keep R = D·V reduced under adjacent transpositions.

Bar identity lives on the birth simplex of each pair. When a transposition
switches the pairing, the identity follows the simplex of the pair that did not
move, which is the continuity rule for vines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .complex import FilteredComplex
from .grid import DiagonalLine
from .matching import BarMatch
from .persistence import Barcode, ReducedMatrix, barcode, order_simplices, reduce


class InvalidSwap(ValueError):
    """Raised when a transposition would put a coface before its face."""


@dataclass
class VineyardState:
    matrix: ReducedMatrix
    values: np.ndarray
    line: DiagonalLine
    line_id: int = -1
    bar_ids: dict[int, int] = field(default_factory=dict)
    _ids: itertools.count = field(default_factory=itertools.count, repr=False)

    @classmethod
    def start(cls, C: FilteredComplex, l: DiagonalLine, line_id: int = -1) -> "VineyardState":
        order, values = order_simplices(C, l)
        state = cls(reduce(C, order), values, l, line_id)
        for s in state.matrix.order:
            if not state.matrix.R[s]:
                state.bar_ids[s] = next(state._ids)
        return state

    @property
    def order(self) -> list[int]:
        return self.matrix.order

    def barcode(self, dims: Iterable[int] | None = None) -> Barcode:
        return barcode(self.matrix, self.values, self.line, dims, self.line_id, self.bar_ids)


def _permute(M: ReducedMatrix, i: int, s: int, t: int) -> None:
    M.order[i], M.order[i + 1] = t, s
    M.pos[t], M.pos[s] = i, i + 1


def transposition_update(state: VineyardState, i: int) -> bool:
    """Swap the simplices at positions i and i+1. Returns True if the pairing switched."""
    M = state.matrix
    s, t = M.order[i], M.order[i + 1]
    if s in M.complex.simplices[t].facets:
        raise InvalidSwap(f"simplex {s} is a face of {t}")
    R, V, low, owner = M.R, M.V, M.low, M.owner
    s_pos, t_pos = not R[s], not R[t]

    if s_pos and t_pos:
        if s in V[t]:
            V[t] ^= V[s]
        _permute(M, i, s, t)
        k, l = owner.get(s), owner.get(t)
        if l is None or s not in R[l]:
            return False
        if k is None:
            # s was essential; the column that died at t now dies at s.
            low[l] = s
            owner[s] = l
            del owner[t]
        elif M.pos[k] < M.pos[l]:
            R[l] ^= R[k]
            V[l] ^= V[k]
            return False
        else:
            R[k] ^= R[l]
            V[k] ^= V[l]
            low[k], owner[t] = t, k
            low[l], owner[s] = s, l
        ids = state.bar_ids
        ids[s], ids[t] = ids[t], ids[s]
        return True

    if not s_pos and not t_pos:
        if s not in V[t]:
            _permute(M, i, s, t)
            return False
        a, b = low[s], low[t]
        R[t] ^= R[s]
        V[t] ^= V[s]
        if M.pos[a] < M.pos[b]:
            _permute(M, i, s, t)
            return False
        _permute(M, i, s, t)
        R[s] ^= R[t]
        V[s] ^= V[t]
        low[t], owner[a] = a, t
        low[s], owner[b] = b, s
        return True

    if not s_pos and t_pos:
        if s not in V[t]:
            _permute(M, i, s, t)
            return False
        # t now kills the class s used to kill, and s takes over t's cycle.
        a = low.pop(s)
        R[t] ^= R[s]
        V[t] ^= V[s]
        _permute(M, i, s, t)
        R[s] ^= R[t]
        V[s] ^= V[t]
        low[t], owner[a] = a, t
        l = owner.pop(t, None)
        if l is not None:
            assert s in R[l]
            low[l], owner[s] = s, l
        state.bar_ids[s] = state.bar_ids.pop(t)
        return True

    if s in V[t]:
        V[t] ^= V[s]
    _permute(M, i, s, t)
    return False


def _schedule_insertion(rank: np.ndarray, order: list[int]) -> Iterable[int]:
    """Adjacent swaps of insertion sort, yielded lazily against the live order."""
    for j in range(1, len(order)):
        k = j
        while k > 0 and rank[order[k - 1]] > rank[order[k]]:
            yield k - 1
            k -= 1


def _schedule_bubble(rank: np.ndarray, order: list[int]) -> Iterable[int]:
    swapped = True
    while swapped:
        swapped = False
        for k in range(len(order) - 1):
            if rank[order[k]] > rank[order[k + 1]]:
                yield k
                swapped = True


@dataclass
class Advance:
    match: BarMatch
    transpositions: int
    switches: int


def advance(
    state: VineyardState,
    next_line: DiagonalLine,
    next_id: int = -1,
    dims: Iterable[int] | None = None,
    schedule: str = "insertion",
) -> Advance:
    """Move the state to next_line and report the matching induced by bar ids."""
    dims = None if dims is None else set(dims)
    old = state.barcode(dims)
    C = state.matrix.complex
    new_order, values = order_simplices(C, next_line)
    rank = np.empty(len(new_order), dtype=np.int64)
    rank[new_order] = np.arange(len(new_order))
    sched = _schedule_insertion if schedule == "insertion" else _schedule_bubble
    count = switches = 0
    order = state.matrix.order
    for i in sched(rank, order):
        switches += transposition_update(state, i)
        count += 1
    assert order == new_order.tolist()
    state.values = values
    state.line = next_line
    state.line_id = next_id
    new = state.barcode(dims)
    where = {b.bar_id: j for j, b in enumerate(new.bars)}
    pairs = {}
    unmatched = set()
    for j, b in enumerate(old.bars):
        if b.bar_id in where:
            pairs[j] = where[b.bar_id]
        else:
            unmatched.add(j)
    return Advance(BarMatch(old, new, pairs, unmatched), count, switches)
