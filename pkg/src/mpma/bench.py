"""Synthetic lower-star multi-filtrations and timing runs.

The base complex is a triangulated m×m vertex grid: every unit cell is cut
along one diagonal into two triangles. Each vertex gets a uniform random value
in [0, 1]^n and every simplex takes the coordinatewise max over its vertices.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .approximation import approximate_module
from .complex import FilteredComplex, make_complex
from .grid import Box

CSV_HEADER = ("n_simplices", "n_lines", "seconds")


def grid_complex_size(m: int) -> int:
    """Simplex count of the triangulated m×m grid."""
    if m <= 0:
        return 0
    cells = (m - 1) ** 2
    return m * m + 2 * m * (m - 1) + cells + 2 * cells


def side_for_size(n_simplices: int) -> int:
    """Largest grid side whose complex has at most n_simplices simplices."""
    m = 0
    while grid_complex_size(m + 1) <= n_simplices:
        m += 1
    return m


def random_lower_star(m: int, n_params: int = 2, seed: int = 0) -> FilteredComplex:
    rng = np.random.default_rng(seed)
    values = rng.uniform(0.0, 1.0, size=(m * m, n_params))
    rows: list[tuple[int, tuple[int, ...], tuple[float, ...]]] = []
    edge_id: dict[tuple[int, int], int] = {}

    def vid(i: int, j: int) -> int:
        return i * m + j

    for v in range(m * m):
        rows.append((0, (), tuple(values[v].tolist())))

    def add_edge(a: int, b: int) -> None:
        a, b = min(a, b), max(a, b)
        edge_id[(a, b)] = len(rows)
        rows.append((1, (a, b), tuple(np.maximum(values[a], values[b]).tolist())))

    for i in range(m):
        for j in range(m):
            if j + 1 < m:
                add_edge(vid(i, j), vid(i, j + 1))
            if i + 1 < m:
                add_edge(vid(i, j), vid(i + 1, j))
            if i + 1 < m and j + 1 < m:
                add_edge(vid(i, j), vid(i + 1, j + 1))
    for i in range(m - 1):
        for j in range(m - 1):
            a, b, c, d = vid(i, j), vid(i, j + 1), vid(i + 1, j), vid(i + 1, j + 1)
            for tri in ((a, b, d), (a, c, d)):
                x, y, z = sorted(tri)
                facets = (edge_id[(x, y)], edge_id[(y, z)], edge_id[(x, z)])
                grade = np.maximum(np.maximum(values[x], values[y]), values[z])
                rows.append((2, facets, tuple(grade.tolist())))
    return make_complex(n_params, rows)


@dataclass
class BenchRow:
    n_simplices: int
    n_lines: int
    seconds: float


def run_bench(sizes: Iterable[int], deltas: Iterable[float], matcher: str = "vineyard",
              n_params: int = 2, dims: Iterable[int] = (0, 1), seed: int = 0) -> list[BenchRow]:
    """Time the full approximation for every (size, delta) pair.

    Sizes are simplex budgets; each is rounded down to the nearest grid complex.
    The box is [0, 1]^n for every run so the line count depends on delta only.
    """
    out = []
    dims = tuple(dims)
    deltas = list(deltas)
    for size in sizes:
        m = side_for_size(int(size))
        if m == 0:
            continue
        C = random_lower_star(m, n_params, seed)
        K = Box(np.zeros(n_params), np.ones(n_params))
        for delta in deltas:
            t0 = time.perf_counter()
            M = approximate_module(C, K, delta, matcher=matcher, dims=dims, strict=False)
            out.append(BenchRow(len(C), M.n_lines, time.perf_counter() - t0))
    return out


def bench_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow((r.n_simplices, r.n_lines, f"{r.seconds:.6f}"))
    return buf.getvalue()
