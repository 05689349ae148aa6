"""Random complexes and brute-force F2 oracles shared by the tests."""

from __future__ import annotations

import itertools

import numpy as np

from mpma.complex import FilteredComplex, make_complex


def random_complex(rng: np.random.Generator, max_simplices: int = 40, n_params: int = 2,
                   max_dim: int = 3, integer_grades: bool = True) -> FilteredComplex:
    """Random simplicial complex closed under faces, with monotone grades.

    Integer grades make ties between simplices common.
    """
    n_vertices = int(rng.integers(1, 9))
    simplices: dict[frozenset, int] = {}
    rows = []
    grades = []

    def grade_for(faces):
        base = np.max([grades[f] for f in faces], axis=0) if faces else np.zeros(n_params)
        bump = rng.integers(0, 3, size=n_params) if integer_grades else rng.uniform(0, 1, size=n_params)
        if faces and rng.random() < 0.3:
            bump = np.zeros(n_params)
        if not faces:
            bump = rng.integers(0, 4, size=n_params) if integer_grades else rng.uniform(0, 2, size=n_params)
        return base + bump

    def add(vs):
        key = frozenset(vs)
        faces = [simplices[frozenset(f)] for f in itertools.combinations(sorted(vs), len(vs) - 1)] if len(vs) > 1 else []
        g = grade_for(faces)
        simplices[key] = len(rows)
        rows.append((len(vs) - 1, faces, g))
        grades.append(g)

    for v in range(n_vertices):
        add((v,))
    attempts = 0
    while len(rows) < max_simplices and attempts < 200:
        attempts += 1
        d = int(rng.integers(1, max_dim + 1))
        if d + 1 > n_vertices:
            continue
        vs = tuple(sorted(rng.choice(n_vertices, size=d + 1, replace=False).tolist()))
        if frozenset(vs) in simplices:
            continue
        missing = [f for k in range(2, d + 1) for f in itertools.combinations(vs, k) if frozenset(f) not in simplices]
        if len(rows) + len(missing) + 1 > max_simplices:
            continue
        for f in sorted(missing, key=len):
            add(f)
        add(vs)
    return make_complex(n_params, rows)


def f2_rank(A: np.ndarray) -> int:
    """Rank over F2 by Gaussian elimination on a 0/1 matrix."""
    A = (np.asarray(A, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        r += 1
        if r == rows:
            break
    return r


def f2_nullspace(A: np.ndarray) -> np.ndarray:
    """Basis of the kernel of A over F2, one vector per row."""
    A = (np.asarray(A, dtype=np.uint8) & 1).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= A[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = A[i, f]
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), cols)


def homology_map_rank(C: FilteredComplex, values: np.ndarray, s: float, t: float, p: int) -> int:
    """rank of H_p(C_s) -> H_p(C_t) for sublevel sets of the given simplex values."""
    dims = C.dims
    p_ids = [i for i in range(len(C)) if dims[i] == p]
    col = {sid: k for k, sid in enumerate(p_ids)}
    low_ids = [i for i in range(len(C)) if dims[i] == p - 1]
    row = {sid: k for k, sid in enumerate(low_ids)}
    up_ids = [i for i in range(len(C)) if dims[i] == p + 1]

    def boundary(ids, rows_index, nrows):
        D = np.zeros((nrows, len(ids)), dtype=np.uint8)
        for k, sid in enumerate(ids):
            for f in C.simplices[sid].facets:
                D[rows_index[f], k] = 1
        return D

    in_s = [sid for sid in p_ids if values[sid] <= s]
    if not in_s:
        return 0
    Dp = boundary(in_s, row, len(low_ids)) if p > 0 else np.zeros((0, len(in_s)), dtype=np.uint8)
    Z = f2_nullspace(Dp)
    if len(Z) == 0:
        return 0
    # Embed cycles of C_s into the chain group of all p-simplices.
    Zfull = np.zeros((len(Z), len(p_ids)), dtype=np.uint8)
    for k, sid in enumerate(in_s):
        Zfull[:, col[sid]] = Z[:, k]
    up_t = [sid for sid in up_ids if values[sid] <= t]
    Bt = boundary(up_t, col, len(p_ids)).T if up_t else np.zeros((0, len(p_ids)), dtype=np.uint8)
    return f2_rank(np.vstack([Bt, Zfull])) - f2_rank(Bt)


def _antichain(P: np.ndarray, kind: str) -> np.ndarray:
    """Drop points dominated by another (from below for births, above for deaths)."""
    keep = []
    for i, p in enumerate(P):
        others = np.delete(P, i, axis=0)
        if kind == "birth":
            dominated = np.any(np.all(others <= p, axis=1) & np.any(others < p, axis=1))
        else:
            dominated = np.any(np.all(others >= p, axis=1) & np.any(others > p, axis=1))
        if not dominated and not any(np.array_equal(p, P[j]) for j in keep):
            keep.append(i)
    return P[keep]


def random_interval(rng: np.random.Generator, n: int = 2, max_corners: int = 4, p_inf: float = 0.2,
                    hom_dim: int = 0):
    """Random connected interval given by corner antichains.

    Every birth corner is below at least one death corner and the comparability
    graph between births and deaths is connected, so the induced support is an
    interval.
    """
    from mpma.approximation import IntervalModule

    while True:
        B = _antichain(rng.uniform(0.0, 1.0, size=(int(rng.integers(1, max_corners + 1)), n)).round(3), "birth")
        D = _antichain(rng.uniform(0.6, 2.0, size=(int(rng.integers(1, max_corners + 1)), n)).round(3), "death")
        if rng.random() < p_inf:
            D[:, int(rng.integers(n))] = np.inf
            D = _antichain(D, "death")
        ok = np.all(B[:, None, :] <= D[None, :, :], axis=2)
        if not ok.any(axis=1).all() or not ok.any(axis=0).all():
            continue
        # Connectivity of the bipartite comparability graph.
        seen_b, seen_d = {0}, set()
        frontier = True
        while frontier:
            frontier = False
            for i in list(seen_b):
                for j in np.flatnonzero(ok[i]):
                    if j not in seen_d:
                        seen_d.add(int(j))
                        frontier = True
            for j in list(seen_d):
                for i in np.flatnonzero(ok[:, j]):
                    if i not in seen_b:
                        seen_b.add(int(i))
                        frontier = True
        if len(seen_b) == len(B) and len(seen_d) == len(D):
            return IntervalModule(B.tolist(), D.tolist(), hom_dim)


def random_line_near(rng: np.random.Generator, n: int, lo: float = -1.0, hi: float = 2.0):
    from mpma.grid import DiagonalLine

    return DiagonalLine.through(rng.uniform(lo, hi, size=n))


def sup_gap(x: np.ndarray, y: np.ndarray) -> float:
    """ℓ∞ norm of x - y with inf - inf = 0."""
    with np.errstate(invalid="ignore"):
        d = np.where(x == y, 0.0, np.abs(x - y))
    return float(np.max(d)) if d.size else 0.0


def bars_on_lines(I, bases: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized interval_bar over many basepoints; NaN where the line misses the support."""
    bases = np.atleast_2d(bases)
    with np.errstate(invalid="ignore"):
        tb = np.max(I.births[None, :, :] - bases[:, None, :], axis=2)
        td = np.min(I.deaths[None, :, :] - bases[:, None, :], axis=2)
    valid = tb[:, :, None] <= td[:, None, :] + tol
    birth = np.where(valid.any(axis=2), tb, np.inf).min(axis=1)
    death = np.where(valid.any(axis=1), td, -np.inf).max(axis=1)
    hit = valid.any(axis=(1, 2))
    return np.where(hit, birth, np.nan), np.where(hit, death, np.nan)


def _points(bases: np.ndarray, t: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        P = bases + t[:, None]
    inf = np.isinf(t)
    P[inf] = t[inf][:, None]
    return P


# Geometry checks. Each returns (violations, cases checked) for one instance.


def rectangle_law_violations(I, rng: np.random.Generator, n_pairs: int = 30, n_inner: int = 20,
                             tol: float = 1e-9) -> tuple[int, int]:
    """Points of R_{a,b} must be in the support whenever a ≤ b both are."""
    n = I.n
    fin = I.finite_bounds()
    X = rng.uniform(fin.low - 0.5, fin.high + 0.5, size=(400, n))
    inside = X[I.contains_many(X, tol)]
    if len(inside) < 2:
        return 0, 0
    bad = checked = 0
    for _ in range(n_pairs):
        a, b = inside[rng.integers(len(inside), size=2)]
        a, b = np.minimum(a, b), np.maximum(a, b)
        if not (I.contains_many(a[None], tol)[0] and I.contains_many(b[None], tol)[0]):
            continue
        Z = np.vstack([a + rng.uniform(0, 1, size=(n_inner, n)) * (b - a), a, b])
        bad += int(np.sum(~I.contains_many(Z, tol)))
        checked += 1
    return bad, checked


def endpoint_stability_violations(I, rng: np.random.Generator, n_pairs: int = 40,
                                  tol: float = 1e-9) -> tuple[int, int]:
    """Comparable line shifts move both endpoints by at most the shift."""
    n = I.n
    x = rng.uniform(-0.5, 2.0, size=(n_pairs, n))
    sign = np.where(rng.random(n_pairs) < 0.5, 1.0, -1.0)
    v = rng.uniform(0, 0.4, size=(n_pairs, n)) * sign[:, None]
    b1 = x - x[:, -1:]
    b2 = (x + v) - (x + v)[:, -1:]
    s1, s2 = bars_on_lines(I, b1), bars_on_lines(I, b2)
    both = ~np.isnan(s1[0]) & ~np.isnan(s2[0])
    bad = 0
    r = np.max(np.abs(v), axis=1)
    for k in (0, 1):
        P1, P2 = _points(b1, s1[k]), _points(b2, s2[k])
        for i in np.flatnonzero(both):
            if sup_gap(P1[i], P2[i]) > r[i] + tol:
                bad += 1
    return bad, int(both.sum())


def recthull_violations(I, rng: np.random.Generator, delta: float, n_points: int = 30,
                        tol: float = 1e-7) -> tuple[int, int]:
    """Endpoints on l_x lie in the rectangle hull of the endpoints of nearby comparable grid lines."""
    from mpma.grid import Box, build_grid

    n = I.n
    K = Box(np.zeros(n), np.full(n, 1.5))
    g = build_grid(K, delta)
    bases = g.basepoints()
    sb, sd = bars_on_lines(I, bases)
    bad = checked = 0
    for _ in range(n_points):
        x = rng.uniform(K.low - delta, K.high + delta)
        bx = x - x[-1]
        tx = bars_on_lines(I, bx[None])
        if np.isnan(tx[0][0]):
            continue
        w = x[None, :] - bases
        dist = (w.max(axis=1) - w.min(axis=1)) / 2
        d = bases[:, :-1] - bx[None, :-1]
        spread = np.maximum(d.max(axis=1), 0) - np.minimum(d.min(axis=1), 0)
        near = np.flatnonzero((dist <= delta + 1e-12) & (spread <= delta + 1e-9))
        if len(near) == 0 or np.any(np.isnan(sb[near])):
            continue
        for k, s in enumerate((sb, sd)):
            t = tx[k][0]
            if np.isinf(t):
                continue
            pts = _points(bases[near], s[near])
            if not np.all(np.isfinite(pts)):
                continue
            p = bx + t
            checked += 1
            if np.any(p < pts.min(axis=0) - tol) or np.any(p > pts.max(axis=0) + tol):
                bad += 1
    return bad, checked


def cluster_violations(I, delta: float, tol: float = 1e-7) -> tuple[int, int]:
    """Endpoints over a full surrounding set are pairwise within 2δ, hence in a 2δ ball."""
    from mpma.grid import Box, build_grid, surrounding_keys

    n = I.n
    g = build_grid(Box(np.zeros(n), np.full(n, 1.5)), delta)
    bases = g.basepoints()
    segs = bars_on_lines(I, bases)
    full = 2 ** (n - 1)
    bad = checked = 0
    for p in range(len(g)):
        S = surrounding_keys(g, p)
        if len(S) < full or np.any(np.isnan(segs[0][S])):
            continue
        checked += 1
        for s in segs:
            pts = _points(bases[S], s[S])
            for a in range(len(pts)):
                for b in range(a + 1, len(pts)):
                    if sup_gap(pts[a], pts[b]) > 2 * delta + tol:
                        bad += 1
    return bad, checked


GEOMETRY_CHECKS = ("rectangle_law", "endpoint_stability", "recthull", "cluster")


def geometry_suite(n_instances: int = 200, seed: int = 0, delta: float = 0.2) -> dict[str, tuple[int, int]]:
    """Run the four geometry checks; per check return (violations, instances with a non-vacuous case)."""
    rng = np.random.default_rng(seed)
    out = {k: [0, 0] for k in GEOMETRY_CHECKS}
    for i in range(n_instances):
        I = random_interval(rng, n=2 + i % 2)
        results = (
            rectangle_law_violations(I, rng),
            endpoint_stability_violations(I, rng),
            recthull_violations(I, rng, delta),
            cluster_violations(I, delta),
        )
        for k, (bad, checked) in zip(GEOMETRY_CHECKS, results):
            out[k][0] += bad
            out[k][1] += int(checked > 0)
    return {k: (v[0], v[1]) for k, v in out.items()}


def exactness_hypotheses_hold(truth, delta: float) -> bool:
    """Separation conditions under which compatibility matching is exact, checked on a δ/2 grid.

    On every line meeting two summands, births or deaths must be more than δ apart; bars of
    length at most 2δ from different summands must be more than δ/2 apart.
    """
    from mpma.grid import build_grid
    from mpma.metrics import recthull

    hull = recthull([c for I in truth for c in np.vstack([I.births, I.deaths]) if np.all(np.isfinite(c))])
    g = build_grid(hull, delta / 2)
    bases = g.basepoints()
    ends = []
    for I in truth:
        b, d = bars_on_lines(I, bases)
        ends.append((_points(bases, b), _points(bases, d), ~np.isnan(b)))
    for i in range(len(truth)):
        for j in range(i + 1, len(truth)):
            (bi, di, hi), (bj, dj, hj) = ends[i], ends[j]
            both = hi & hj
            close = (np.max(np.abs(bi - bj), axis=1) <= delta) & (np.max(np.abs(di - dj), axis=1) <= delta)
            if np.any(close & both):
                return False
            si = hi & (np.max(di - bi, axis=1) <= 2 * delta)
            sj = hj & (np.max(dj - bj, axis=1) <= 2 * delta)
            for p in np.flatnonzero(si):
                gap = np.maximum(bj[sj] - di[p], bi[p] - dj[sj]).max(axis=1, initial=0.0)
                if np.any(np.maximum(gap, 0) <= delta / 2):
                    return False
    return True
