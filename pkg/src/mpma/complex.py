"""One-critical multi-filtered simplicial complexes over F2.

A complex is a list of simplices in a fixed id order. Each simplex carries its
codimension-1 faces (by id) and a single grade in R^n. The text format is
line oriented::

    mpcomplex <n_params> <n_simplices>
    <dim> ; <facet ids> ; <grade values>

Ids are the 0-based line order of the simplex lines; ``#`` starts a comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np


class ComplexError(ValueError):
    """Raised for malformed or invalid complexes."""


@dataclass(frozen=True)
class Simplex:
    id: int
    dim: int
    facets: tuple[int, ...]
    grade: tuple[float, ...]


@dataclass(frozen=True)
class FilteredComplex:
    n_params: int
    simplices: tuple[Simplex, ...]
    grades: np.ndarray = field(init=False, repr=False, compare=False)
    dims: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        grades = np.array([s.grade for s in self.simplices], dtype=float)
        grades = grades.reshape(len(self.simplices), self.n_params)
        grades.setflags(write=False)
        dims = np.array([s.dim for s in self.simplices], dtype=np.int64)
        dims.setflags(write=False)
        object.__setattr__(self, "grades", grades)
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def max_dim(self) -> int:
        return int(self.dims.max()) if len(self.simplices) else -1

    def bounding_box(self):
        """Smallest box containing every grade."""
        from .grid import Box

        if not self.simplices:
            raise ComplexError("empty complex has no bounding box")
        return Box(self.grades.min(axis=0), self.grades.max(axis=0))


def validate(C: FilteredComplex) -> FilteredComplex:
    """Check face structure and grade monotonicity; return C unchanged."""
    if C.n_params < 1:
        raise ComplexError("n_params must be at least 1")
    for s in C.simplices:
        if len(s.grade) != C.n_params:
            raise ComplexError(f"simplex {s.id}: expected {C.n_params} grade values, got {len(s.grade)}")
        if not all(np.isfinite(s.grade)):
            raise ComplexError(f"simplex {s.id}: grade values must be finite")
        if s.dim < 0:
            raise ComplexError(f"simplex {s.id}: negative dimension")
        expected = s.dim + 1 if s.dim >= 1 else 0
        if len(set(s.facets)) != expected or len(s.facets) != expected:
            raise ComplexError(f"simplex {s.id}: dim {s.dim} needs {expected} distinct facets, got {list(s.facets)}")
        for f in s.facets:
            if not 0 <= f < len(C.simplices):
                raise ComplexError(f"simplex {s.id}: dangling facet reference {f}")
            face = C.simplices[f]
            if face.dim != s.dim - 1:
                raise ComplexError(f"simplex {s.id}: facet {f} has dim {face.dim}, expected {s.dim - 1}")
            if any(a > b for a, b in zip(face.grade, s.grade)):
                raise ComplexError(
                    f"grade monotonicity violated: face {f} {face.grade} is not below coface {s.id} {s.grade}"
                )
    return C


def make_complex(n_params: int, rows: Iterable[tuple[int, Sequence[int], Sequence[float]]]) -> FilteredComplex:
    """Build and validate a complex from (dim, facets, grade) rows in id order."""
    simplices = tuple(
        Simplex(i, int(d), tuple(int(f) for f in facets), tuple(float(g) for g in grade))
        for i, (d, facets, grade) in enumerate(rows)
    )
    return validate(FilteredComplex(n_params, simplices))


def parse_complex(text: str | bytes) -> FilteredComplex:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "mpcomplex":
                raise ComplexError(f"line {lineno}: expected header 'mpcomplex <n_params> <n_simplices>'")
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise ComplexError(f"line {lineno}: header counts must be integers") from None
            if header[0] < 1 or header[1] < 0:
                raise ComplexError(f"line {lineno}: invalid header counts")
            continue
        fields = line.split(";")
        if len(fields) != 3:
            raise ComplexError(f"line {lineno}: expected '<dim> ; <facets> ; <grade>'")
        try:
            dim = int(fields[0])
            facets = [int(x) for x in fields[1].split()]
            grade = [float(x) for x in fields[2].split()]
        except ValueError as exc:
            raise ComplexError(f"line {lineno}: {exc}") from None
        if len(grade) != header[0]:
            # A second grade on one simplex would make the filtration multi-critical.
            raise ComplexError(f"line {lineno}: expected {header[0]} grade values, got {len(grade)}")
        rows.append((dim, facets, grade))
    if header is None:
        raise ComplexError("missing header")
    if len(rows) != header[1]:
        raise ComplexError(f"header declares {header[1]} simplices, found {len(rows)}")
    return make_complex(header[0], rows)


def serialize(C: FilteredComplex) -> str:
    lines = [f"mpcomplex {C.n_params} {len(C)}"]
    for s in C.simplices:
        facets = " ".join(str(f) for f in s.facets)
        grade = " ".join(repr(float(g)) for g in s.grade)
        lines.append(f"{s.dim} ; {facets} ; {grade}")
    return "\n".join(lines) + "\n"


def vertices_of(C: FilteredComplex) -> list[frozenset[int]]:
    """Vertex ids of every simplex."""
    verts: list[frozenset[int]] = []
    for s in C.simplices:
        if s.dim == 0:
            verts.append(frozenset((s.id,)))
        else:
            verts.append(frozenset().union(*(verts[f] for f in s.facets)))
    return verts


def lower_star(base: FilteredComplex, vertex_values: Mapping[int, float]) -> FilteredComplex:
    """Append one grade coordinate equal to the max vertex value of each simplex."""
    missing = [s.id for s in base.simplices if s.dim == 0 and s.id not in vertex_values]
    if missing:
        raise ComplexError(f"missing vertex value for vertices {missing[:10]}")
    extra = []
    for s in base.simplices:
        if s.dim == 0:
            extra.append(float(vertex_values[s.id]))
        else:
            extra.append(max(extra[f] for f in s.facets))
    rows = [(s.dim, s.facets, (*s.grade, v)) for s, v in zip(base.simplices, extra)]
    return make_complex(base.n_params + 1, rows)


class ComplexBuilder:
    """Assemble a complex from vertex-labelled simplices.

    Faces are looked up by vertex set, so they must be added before cofaces.
    """

    def __init__(self, n_params: int):
        self.n_params = n_params
        self._rows: list[tuple[int, tuple[int, ...], tuple[float, ...]]] = []
        self._ids: dict[frozenset, int] = {}

    def add(self, vertices: Sequence[str | int], grade: Sequence[float]) -> int:
        key = frozenset(vertices)
        if len(key) != len(vertices):
            raise ComplexError(f"repeated vertex in {vertices}")
        if key in self._ids:
            raise ComplexError(f"simplex {sorted(map(str, key))} added twice")
        dim = len(key) - 1
        facets: tuple[int, ...] = ()
        if dim > 0:
            try:
                facets = tuple(self._ids[frozenset(f)] for f in combinations(sorted(key, key=str), dim))
            except KeyError:
                raise ComplexError(f"faces of {sorted(map(str, key))} must be added first") from None
        self._ids[key] = len(self._rows)
        self._rows.append((dim, facets, tuple(float(g) for g in grade)))
        return self._ids[key]

    def has(self, vertices: Iterable[str | int]) -> bool:
        return frozenset(vertices) in self._ids

    def build(self) -> FilteredComplex:
        return make_complex(self.n_params, self._rows)
