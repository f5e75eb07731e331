"""Integer-weight variant: coprime vectors in [M]^R replace unit-modulus phases.

Each right node owns 2R real rows, R identification rows then R verification
rows. A leaf group is x_j times an integer vector; dividing out the first
component gives a normalized vector that names j through a lookup table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product

import numpy as np

from .errors import EnsembleTooSmall, InvalidArgument
from .exact import (ITERATION_CAP, STUCK_CORE, SUCCESS, VERIFICATION_ANOMALY, ZERO_REL,
                    DecodeReport, _LeafSet, _sparse)
from .graph import LeftRegularGraph
from .signal import make_rng

ENUM_LIMIT = 10 ** 6
PROP_REL = 1e-9


def _gcd(v) -> int:
    return reduce(math.gcd, (int(a) for a in v), 0)


def enumerate_coprime(M: int, R: int) -> np.ndarray:
    """All of [M]^R with gcd 1, in lexicographic order of the raw vectors."""
    if M < 1 or R < 1:
        raise InvalidArgument("M and R must be positive")
    if M ** R > ENUM_LIMIT:
        from .errors import InfeasibleEnumeration
        raise InfeasibleEnumeration(f"M^R = {M ** R} exceeds {ENUM_LIMIT}")
    grid = np.array(list(product(range(1, M + 1), repeat=R)), dtype=np.int64).reshape(-1, R)
    g = np.gcd.reduce(grid, axis=1)
    return grid[g == 1]


def normalized_order(C: np.ndarray) -> np.ndarray:
    """Permutation sorting C by c/c_1 lexicographically; ties broken by c_1."""
    C = np.asarray(C, dtype=np.int64)
    ratios = C[:, 1:] / C[:, :1]
    keys = [C[:, 0]] + [ratios[:, r] for r in range(ratios.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


def gen_coprime_vectors(M: int, R: int, count: int, seed=0) -> np.ndarray:
    """``count`` distinct uniform draws from the coprime vectors of [M]^R."""
    if count < 0:
        raise InvalidArgument("count must be nonnegative")
    if count == 0:
        return np.zeros((0, R), dtype=np.int64)
    rng = make_rng(seed)
    if M ** R <= ENUM_LIMIT:
        C = enumerate_coprime(M, R)
        if count > len(C):
            raise EnsembleTooSmall(f"asked for {count} vectors, only {len(C)} coprime in [{M}]^{R}")
        return C[rng.choice(len(C), size=count, replace=False)]
    if count > M ** R // 2:
        raise EnsembleTooSmall(f"count {count} exceeds M^R/2")
    seen, out = set(), []
    while len(out) < count:
        draw = rng.integers(1, M + 1, size=(2 * (count - len(out)) + 8, R))
        for v in map(tuple, draw.tolist()):
            if v not in seen and _gcd(v) == 1:
                seen.add(v)
                out.append(v)
                if len(out) == count:
                    break
    return np.array(out, dtype=np.int64)


def minimal_vector(ratios, M: int):
    """Smallest positive integer vector proportional to (1, ratios...), or None."""
    fr = [Fraction(1)] + [Fraction(r).limit_denominator(M) for r in ratios]
    if any(f <= 0 for f in fr):
        return None
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fr), 1)
    v = [int(f * den) for f in fr]
    g = _gcd(v)
    return tuple(a // g for a in v)


def _proportional(vals, vec, scale) -> bool:
    """vals == scale * vec componentwise within relative tolerance."""
    tol = PROP_REL * max(abs(scale), 1e-300) * max(vec)
    return all(abs(v - scale * c) <= tol for v, c in zip(vals, vec))


@dataclass(frozen=True)
class IntEnsemble:
    graph: LeftRegularGraph
    M: int
    R: int
    ident_vec: np.ndarray  # (n, d, R)
    verif_vec: np.ndarray  # (n, d, R)
    _lookup: dict = field(init=False, repr=False)
    _lists: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n, d = self.graph.n_left, self.graph.degree
        for name in ("ident_vec", "verif_vec"):
            a = getattr(self, name)
            if a.shape != (n, d, self.R):
                raise InvalidArgument(f"{name} has shape {a.shape}")
            if a.min(initial=1) < 1 or a.max(initial=1) > self.M:
                raise InvalidArgument(f"{name} entries outside [1, {self.M}]")
            if not np.all(np.gcd.reduce(a.reshape(-1, self.R), axis=1) == 1):
                raise InvalidArgument(f"{name} has a vector with gcd > 1")
        lookup = {}
        for j in range(n):
            for s, i in enumerate(self.graph.adj_list[j]):
                key = (i, tuple(self.ident_vec[j, s].tolist()))
                if key in lookup and lookup[key] != j:
                    raise InvalidArgument(f"right node {i}: identification vectors collide")
                lookup[key] = j
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_lists", (self.ident_vec.tolist(), self.verif_vec.tolist()))

    @property
    def n(self) -> int:
        return self.graph.n_left

    @property
    def m(self) -> int:
        return 2 * self.R * self.graph.n_right

    def identify(self, i: int, vec):
        return self._lookup.get((i, tuple(vec)))

    def dense_matrix(self) -> np.ndarray:
        g, R = self.graph, self.R
        A = np.zeros((self.m, g.n_left), dtype=np.int64)
        for j in range(g.n_left):
            for s, i in enumerate(g.adj_list[j]):
                A[2 * R * i:2 * R * i + R, j] = self.ident_vec[j, s]
                A[2 * R * i + R:2 * R * (i + 1), j] = self.verif_vec[j, s]
        return A


def build_int(graph: LeftRegularGraph, M: int, R: int, seed=0, strict=False) -> IntEnsemble:
    """Ensemble with left node j carrying the j-th normalized coprime vector.

    With ``strict`` the global capacity conditions (n <= |C| for identification,
    d*n <= |C| for distinct verification vectors) must hold. Otherwise a
    too-small C falls back to per-right-node assignment: identification vectors
    are ranked among the left neighbours of each right node, and verification
    vectors are drawn without replacement per right node, which keeps every
    leaf test unambiguous.
    """
    if M < 2 or R < 1:
        raise InvalidArgument("need M >= 2 and R >= 1")
    n, d = graph.n_left, graph.degree
    rng = make_rng(seed)
    if M ** R <= ENUM_LIMIT:
        C = enumerate_coprime(M, R)
        size = len(C)
    else:
        C, size = None, None
    if strict and size is not None and d * n > size:
        raise EnsembleTooSmall(f"d*n = {d * n} exceeds |C| = {size}")

    ident = np.empty((n, d, R), dtype=np.int64)
    if C is not None and n <= size:
        ranked = C[normalized_order(C)]
        ident[:] = ranked[:n, None, :]
    elif C is None:
        # huge C: ranks below n are lexicographically tiny; use first-component-1 vectors
        pool = gen_coprime_vectors(M, R, n, seed=(0,) + _seed_tail(seed))
        pool[:, 0] = 1
        pool = np.unique(pool, axis=0)
        if len(pool) < n:
            raise EnsembleTooSmall("could not draw enough distinct identification vectors")
        ranked = pool[normalized_order(pool)]
        ident[:] = ranked[:n, None, :]
    else:
        ranked = C[normalized_order(C)]
        deg = graph.right_degrees()
        if deg.max(initial=0) > size:
            raise EnsembleTooSmall(f"a right node has degree {deg.max()} > |C| = {size}")
        for i in range(graph.n_right):
            lefts = graph.right_neighbors(i)
            for r, j in enumerate(lefts):
                ident[j, graph.slot_of(int(j), i)] = ranked[r]

    if C is not None and d * n <= size:
        verif = C[rng.choice(size, size=d * n, replace=False)].reshape(n, d, R)
    elif C is None:
        verif = gen_coprime_vectors(M, R, d * n, seed=rng.integers(2 ** 63)).reshape(n, d, R)
    else:
        verif = np.empty((n, d, R), dtype=np.int64)
        for i in range(graph.n_right):
            lefts = graph.right_neighbors(i)
            pick = C[rng.choice(size, size=len(lefts), replace=False)]
            for r, j in enumerate(lefts):
                verif[j, graph.slot_of(int(j), i)] = pick[r]
    return IntEnsemble(graph, M, R, ident, verif)


def _seed_tail(seed):
    return tuple(seed) if isinstance(seed, tuple) else (seed,) if isinstance(seed, int) else (1,)


def encode_int(ens: IntEnsemble, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (ens.n,):
        raise InvalidArgument("signal length does not match ensemble")
    g, R = ens.graph, ens.R
    dtype = np.int64 if np.issubdtype(x.dtype, np.integer) else float
    y = np.zeros((g.n_right, 2 * R), dtype=dtype)
    vals = np.concatenate([ens.ident_vec, ens.verif_vec], axis=2) * x[:, None, None]
    np.add.at(y, g.adjacency.ravel(), vals.reshape(-1, 2 * R).astype(dtype))
    return y.ravel()


def decode_int(ens: IntEnsemble, y, seed=0, iter_cap=None, k=None) -> DecodeReport:
    """Peeling with normalized-vector identification.

    A candidate group is normalized by its first identification component,
    snapped to the smallest integer vector with entries at most M, looked up,
    then confirmed by checking that both halves of the group are the same
    multiple of the edge's stored vectors.
    """
    g, R = ens.graph, ens.R
    y = np.asarray(y)
    if y.shape != (ens.m,):
        raise InvalidArgument(f"expected {ens.m} measurements, got {y.shape}")
    rows = y.astype(float).reshape(-1, 2 * R).tolist()
    scale = float(np.max(np.abs(y))) if y.size else 0.0
    thr = ZERO_REL * max(1.0, scale)
    identL, verifL = ens._lists
    if iter_cap is None:
        iter_cap = 2 * k + 16 if k is not None else 2 * g.n_right + 16

    def is_zero(i):
        return all(abs(v) <= thr for v in rows[i])

    def test(i):
        row = rows[i]
        y1 = row[0]
        if abs(y1) <= thr:
            return None
        ratios = [v / y1 for v in row[1:R]]
        vec = minimal_vector(ratios, ens.M)
        if vec is None or max(vec) > ens.M:
            return None
        j = ens.identify(i, vec)
        if j is None:
            return None
        s = g.slot_of(j, i)
        value = y1 / identL[j][s][0]
        if not _proportional(row[:R], identL[j][s], value):
            return None
        if not _proportional(row[R:], verifL[j][s], value):
            return None
        return j, s, value

    rng = make_rng(seed)
    leaves = _LeafSet(g.n_right)
    zero0 = [is_zero(i) for i in range(g.n_right)]
    for i in range(g.n_right):
        if not zero0[i] and test(i) is not None:
            leaves.add(i)
    xhat, iterations, anomalies, ops = {}, 0, 0, 0
    while len(leaves) and iterations < iter_cap:
        i = leaves.pick(rng)
        hit = test(i)
        if hit is None:
            leaves.discard(i)
            continue
        iterations += 1
        j, _, value = hit
        if j in xhat:
            anomalies += 1
        xhat[j] = xhat.get(j, 0.0) + value
        for s, i2 in enumerate(g.adj_list[j]):
            a, v = identL[j][s], verifL[j][s]
            row = rows[i2]
            for r in range(R):
                row[r] -= value * a[r]
                row[R + r] -= value * v[r]
            ops += 2 * R
            if zero0[i2] and i2 != i:
                anomalies += 1
            if i2 == i or is_zero(i2):
                rows[i2] = [0.0] * (2 * R)
                leaves.discard(i2)
            elif test(i2) is not None:
                leaves.add(i2)
            else:
                leaves.discard(i2)
    resid = max((abs(v) for row in rows for v in row), default=0.0)
    if resid <= thr:
        status = SUCCESS
    elif anomalies:
        status = VERIFICATION_ANOMALY
    elif iterations >= iter_cap:
        status = ITERATION_CAP
    else:
        status = STUCK_CORE
    return DecodeReport(_sparse(g.n_left, xhat), status, iterations, resid, ops, anomalies)


def write_int_ensemble(ens: IntEnsemble, fh):
    """Per-edge table ``i j c_1..c_R v_1..v_R``; the graph goes in its own file."""
    for j in range(ens.n):
        for s, i in enumerate(ens.graph.adj_list[j]):
            cols = [i, j] + ens.ident_vec[j, s].tolist() + ens.verif_vec[j, s].tolist()
            fh.write(" ".join(map(str, cols)) + "\n")


def read_int_ensemble(graph: LeftRegularGraph, M: int, fh) -> IntEnsemble:
    n, d = graph.n_left, graph.degree
    rows = [list(map(int, ln.split())) for ln in fh if ln.strip()]
    if len(rows) != n * d:
        raise InvalidArgument(f"expected {n * d} edge lines, got {len(rows)}")
    R = (len(rows[0]) - 2) // 2
    ident = np.zeros((n, d, R), dtype=np.int64)
    verif = np.zeros((n, d, R), dtype=np.int64)
    for r in rows:
        i, j = r[0], r[1]
        s = graph.slot_of(j, i)
        if s < 0:
            raise InvalidArgument(f"edge ({i}, {j}) not in graph")
        ident[j, s] = r[2:2 + R]
        verif[j, s] = r[2 + R:]
    return IntEnsemble(graph, M, R, ident, verif)
