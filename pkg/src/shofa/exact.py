"""Phase-encoded measurements and peeling recovery for exactly k-sparse signals.

Every edge (i, j) of the graph carries a unit-modulus weight. In ``split`` mode
each right node owns an identification row, whose phase is an integer multiple
of a fixed unit that names j, and a verification row with a random grid phase.
In ``combined`` mode a single row carries both: the structured phase plus a
random sub-unit offset.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .graph import LeftRegularGraph
from .ops import OpCounter
from .signal import SparseVector, make_rng

SPLIT = "split"
COMBINED = "combined"

SUCCESS = "Success"
STUCK_CORE = "StuckCore"
VERIFICATION_ANOMALY = "VerificationAnomaly"
ITERATION_CAP = "IterationCap"

ZERO_REL = 1e-12
IDENT_TOL = 1e-6
VERIFY_REL = 1e-9


def default_grid(k=None) -> int:
    return max(int(k) ** 3, 4096) if k else 4096


@dataclass(frozen=True)
class ExactEnsemble:
    graph: LeftRegularGraph
    mode: str
    ident_code: np.ndarray  # (n, d) integer phase codes; code * unit is the structured phase
    unit: float
    ident_phase: np.ndarray  # (n, d) full phase of the identification (or combined) entry
    verif_phase: np.ndarray | None  # (n, d), split mode only
    grid_V: int
    ident_coef: np.ndarray = field(init=False, repr=False)
    verif_coef: np.ndarray | None = field(init=False, repr=False)
    _lookup: dict | None = field(init=False, repr=False)
    coef_lists: tuple = field(init=False, repr=False)

    def __post_init__(self):
        g = self.graph
        if self.mode not in (SPLIT, COMBINED):
            raise InvalidArgument(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "ident_coef", np.exp(1j * self.ident_phase))
        vc = None if self.verif_phase is None else np.exp(1j * self.verif_phase)
        object.__setattr__(self, "verif_coef", vc)
        standard = np.array_equal(self.ident_code, np.repeat(np.arange(g.n_left)[:, None], g.degree, 1))
        lookup = None
        if not standard:
            lookup = {}
            for j in range(g.n_left):
                for s, i in enumerate(g.adjacency[j].tolist()):
                    key = (i, int(self.ident_code[j, s]))
                    if key in lookup:
                        raise InvalidArgument(f"right node {i} has two edges with code {key[1]}")
                    lookup[key] = j
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "coef_lists", (
            self.ident_coef.tolist(),
            None if vc is None else vc.tolist(),
            self.ident_phase.tolist(),
        ))

    @property
    def n(self) -> int:
        return self.graph.n_left

    @property
    def rows_per_node(self) -> int:
        return 2 if self.mode == SPLIT else 1

    @property
    def m(self) -> int:
        return self.rows_per_node * self.graph.n_right

    @property
    def period(self) -> int:
        # number of codes spanning a half-turn
        return int(round(np.pi / self.unit))

    def locate(self, i: int, code: int):
        """(j, slot) of the edge at right node i carrying ``code``, else None."""
        if self._lookup is None:
            j = code
            if not 0 <= j < self.graph.n_left:
                return None
        else:
            j = self._lookup.get((i, code))
            if j is None:
                return None
        s = self.graph.slot_of(j, i)
        return None if s < 0 else (j, s)

    def dense_matrix(self) -> np.ndarray:
        g = self.graph
        A = np.zeros((self.m, g.n_left), dtype=complex)
        r = self.rows_per_node
        for j in range(g.n_left):
            for s, i in enumerate(g.adjacency[j].tolist()):
                A[r * i, j] = self.ident_coef[j, s]
                if r == 2:
                    A[r * i + 1, j] = self.verif_coef[j, s]
        return A


def build_exact(graph: LeftRegularGraph, mode=SPLIT, seed=0, k=None, grid_levels=None) -> ExactEnsemble:
    """Identification phase j*pi/(2n) on every edge of left node j.

    The verification grid has ``grid_levels`` levels, by default max(k^3, 4096).
    In combined mode the random offset r*pi/(4nV), r < V, stays below half a
    code step, so rounding the phase to the nearest multiple of pi/(2n) gives j.
    """
    n, d = graph.n_left, graph.degree
    V = int(grid_levels) if grid_levels else default_grid(k)
    rng = make_rng(seed)
    unit = np.pi / (2 * n)
    code = np.repeat(np.arange(n)[:, None], d, axis=1)
    levels = rng.integers(0, V, size=(n, d))
    if mode == SPLIT:
        return ExactEnsemble(graph, SPLIT, code, unit, code * unit, levels * (np.pi / 2 / V), V)
    if mode == COMBINED:
        phase = code * unit + levels * (unit / (2 * V))
        return ExactEnsemble(graph, COMBINED, code, unit, phase, None, V)
    raise InvalidArgument(f"unknown mode {mode!r}")


def ensemble_from_codes(graph, codes, unit, verif_phase, grid_V=4096) -> ExactEnsemble:
    """Split-mode ensemble with caller-chosen identification codes (phase = code * unit)."""
    codes = np.asarray(codes, dtype=np.int64).reshape(graph.n_left, graph.degree)
    return ExactEnsemble(graph, SPLIT, codes, float(unit), codes * float(unit),
                         np.asarray(verif_phase, dtype=float).reshape(codes.shape), grid_V)


def _columns(ens, x):
    if isinstance(x, SparseVector):
        if x.length != ens.n:
            raise InvalidArgument("signal length does not match ensemble")
        return x.indices, x.values
    x = np.asarray(x, dtype=float)
    if x.shape != (ens.n,):
        raise InvalidArgument("signal length does not match ensemble")
    return np.arange(ens.n), x


def encode(ens: ExactEnsemble, x, counter: OpCounter | None = None) -> np.ndarray:
    """y = A x, edge by edge. Split output interleaves (ident, verif) per right node."""
    cols, vals = _columns(ens, x)
    g = ens.graph
    r = ens.rows_per_node
    y = np.zeros(ens.m, dtype=complex)
    rows = r * g.adjacency[cols]
    np.add.at(y, rows.ravel(), (ens.ident_coef[cols] * vals[:, None]).ravel())
    if r == 2:
        np.add.at(y, (rows + 1).ravel(), (ens.verif_coef[cols] * vals[:, None]).ravel())
    if counter is not None:
        counter.add(r * g.degree * len(cols))
    return y


def update(ens: ExactEnsemble, y, j: int, delta: float, counter: OpCounter | None = None) -> np.ndarray:
    """Measurements after x_j += delta, touching only the d (split: 2d) affected rows."""
    if not 0 <= j < ens.n:
        raise InvalidArgument(f"index {j} outside [0, {ens.n})")
    y = np.array(y, dtype=complex, copy=True)
    r = ens.rows_per_node
    for s, i in enumerate(ens.graph.adjacency[j].tolist()):
        y[r * i] += delta * ens.ident_coef[j, s]
        if r == 2:
            y[r * i + 1] += delta * ens.verif_coef[j, s]
    if counter is not None:
        counter.add(r * ens.graph.degree)
    return y


@dataclass
class DecodeReport:
    xhat: SparseVector
    status: str
    iterations: int
    residual_linf: float
    ops: int = 0
    anomalies: int = 0

    @property
    def success(self) -> bool:
        return self.status == SUCCESS


class _Residual:
    """Decoder working state: residual rows plus the leaf test."""

    def __init__(self, ens, y, rows=None):
        y = np.asarray(y, dtype=complex)
        if y.shape != (ens.m,):
            raise InvalidArgument(f"expected {ens.m} measurements, got {y.shape}")
        self.ens = ens
        self.coefI = ens.coef_lists[0]
        self.coefV = ens.coef_lists[1]
        self.phase = ens.coef_lists[2]
        r = ens.rows_per_node
        if rows is None:
            yI, yV = (y[0::2], y[1::2]) if r == 2 else (y, None)
            seen = y
        else:
            # local view: only the listed right nodes, held in dicts
            rows = np.asarray(rows, dtype=np.int64)
            yI = dict(zip(rows.tolist(), y[r * rows].tolist()))
            yV = dict(zip(rows.tolist(), y[r * rows + 1].tolist())) if r == 2 else None
            seen = np.concatenate([y[r * rows + t] for t in range(r)])
        self.yI = yI.tolist() if rows is None else yI
        self.yV = None if yV is None else (yV.tolist() if rows is None else yV)
        scale = float(np.max(np.abs(seen))) if seen.size else 0.0
        self.zero_thr = ZERO_REL * max(1.0, scale)
        self.combined_tol = ens.unit / (4 * ens.grid_V)

    def is_zero(self, i):
        if abs(self.yI[i]) > self.zero_thr:
            return False
        return self.yV is None or abs(self.yV[i]) <= self.zero_thr

    def test(self, i):
        """(j, slot, value) if right node i currently looks like a leaf, else None."""
        ens = self.ens
        yi = self.yI[i]
        mag = abs(yi)
        if mag <= self.zero_thr:
            return None
        theta = cmath.phase(yi)
        q = (theta % math.pi) / ens.unit
        code = round(q)
        if self.yV is not None and abs(q - code) >= IDENT_TOL:
            return None
        hit = ens.locate(i, code % ens.period)
        if hit is None:
            return None
        j, s = hit
        a = self.coefI[j][s]
        # sign: the residual sits on the edge phase (positive) or opposite it
        value = mag if (yi * a.conjugate()).real > 0 else -mag
        if self.yV is not None:
            if abs(self.yV[i] - value * self.coefV[j][s]) > VERIFY_REL * mag + self.zero_thr:
                return None
        else:
            off = (theta - self.phase[j][s]) % math.pi
            if min(off, math.pi - off) > self.combined_tol:
                return None
        return j, s, value

    def subtract(self, i, j, s, value):
        self.yI[i] -= value * self.coefI[j][s]
        if self.yV is not None:
            self.yV[i] -= value * self.coefV[j][s]

    def clear(self, i):
        self.yI[i] = 0j
        if self.yV is not None:
            self.yV[i] = 0j

    def linf(self):
        out = max(map(abs, self.yI), default=0.0)
        if self.yV is not None:
            out = max(out, max(map(abs, self.yV), default=0.0))
        return out


class _LeafSet:
    """Indexable set with O(1) insert, remove and uniform pick."""

    def __init__(self, size):
        self.items = []
        self.pos = np.full(size, -1, dtype=np.int64)

    def __len__(self):
        return len(self.items)

    def __contains__(self, i):
        return self.pos[i] >= 0

    def add(self, i):
        if self.pos[i] < 0:
            self.pos[i] = len(self.items)
            self.items.append(i)

    def discard(self, i):
        p = self.pos[i]
        if p < 0:
            return
        last = self.items.pop()
        if last != i:
            self.items[p] = last
            self.pos[last] = p
        self.pos[i] = -1

    def pick(self, rng):
        return self.items[int(rng.integers(len(self.items)))]


def decode(ens: ExactEnsemble, y, seed=0, iter_cap=None, k=None) -> DecodeReport:
    """Peeling reconstruction.

    Builds the leaf list by testing every right node, then repeatedly takes a
    random leaf, reads off (j, x_j), subtracts x_j from the d measurements of j
    and re-tests the other neighbours. ``iter_cap`` defaults to 2k + 16 when k
    is given, else 2m' + 16.

    ``ops`` in the report counts steps the way the complexity analysis does:
    2 angle evaluations plus at most 2 checks per right node at start-up, then
    per iteration 2 for the picked leaf, 4 per touched neighbour row pair for
    the subtraction and 2 per re-test.
    """
    g = ens.graph
    st = _Residual(ens, y)
    m_prime = g.n_right
    orig_zero = [st.is_zero(i) for i in range(m_prime)]
    if iter_cap is None:
        iter_cap = 2 * (k if k is not None else m_prime) + 16
    rng = make_rng(seed)
    leaves = _LeafSet(m_prime)
    r = ens.rows_per_node
    adj = g.adj_list
    ops = 0
    for i in range(m_prime):
        ops += 2
        if orig_zero[i]:
            continue
        ops += 2
        if st.test(i) is not None:
            leaves.add(i)
    xhat = {}
    iterations = 0
    anomalies = 0
    while len(leaves) and iterations < iter_cap:
        i = leaves.pick(rng)
        ops += 2
        hit = st.test(i)
        leaves.discard(i)
        if hit is None:
            continue
        j, _, value = hit
        iterations += 1
        if j in xhat:
            anomalies += 1
        xhat[j] = xhat.get(j, 0.0) + value
        for s, i2 in enumerate(adj[j]):
            if i2 == i:
                st.clear(i)
                continue
            if orig_zero[i2]:
                anomalies += 1
            st.subtract(i2, j, s, value)
            ops += 2 * r + 2
            if st.test(i2) is not None:
                leaves.add(i2)
            else:
                leaves.discard(i2)
    resid = st.linf()
    if resid <= st.zero_thr:
        status = SUCCESS
    elif anomalies:
        status = VERIFICATION_ANOMALY
    elif iterations >= iter_cap:
        status = ITERATION_CAP
    else:
        status = STUCK_CORE
    return DecodeReport(_sparse(g.n_left, xhat), status, iterations, resid, ops, anomalies)


def _sparse(n, entries):
    idx = sorted(j for j, v in entries.items() if v != 0)
    return SparseVector(n, np.array(idx, dtype=np.int64), np.array([entries[j] for j in idx]))


@dataclass(frozen=True)
class QueryAnswer:
    answered: bool
    value: float | None = None


DECLINED = QueryAnswer(False)


def query(ens: ExactEnsemble, y, j: int) -> QueryAnswer:
    """Estimate x_j from at most d right nodes without decoding the rest."""
    if not 0 <= j < ens.n:
        raise InvalidArgument(f"index {j} outside [0, {ens.n})")
    nbrs = ens.graph.adj_list[j]
    st = _Residual(ens, y, rows=nbrs)
    for i in nbrs:
        if st.is_zero(i):
            return QueryAnswer(True, 0.0)
    for i in nbrs:
        hit = st.test(i)
        if hit is not None and hit[0] == j:
            return QueryAnswer(True, hit[2])
    return DECLINED


def write_ensemble(ens: ExactEnsemble, fh) -> None:
    """Per-edge phase table ``i j ident_phase verif_phase`` after a ``# mode unit V`` line.

    Combined ensembles have no verification row; that column reads ``nan``.
    The graph itself is written separately with :func:`shofa.graph.write_graph`.
    """
    fh.write(f"# {ens.mode} {ens.unit!r} {ens.grid_V}\n")
    for j in range(ens.n):
        for s, i in enumerate(ens.graph.adj_list[j]):
            vp = float("nan") if ens.verif_phase is None else float(ens.verif_phase[j, s])
            fh.write(f"{i} {j} {float(ens.ident_phase[j, s])!r} {vp!r}\n")


def read_ensemble(graph: LeftRegularGraph, fh) -> ExactEnsemble:
    head = fh.readline().split()
    if len(head) != 4 or head[0] != "#":
        raise InvalidArgument("missing '# mode unit V' header")
    mode, unit, V = head[1], float(head[2]), int(head[3])
    shape = (graph.n_left, graph.degree)
    ident = np.full(shape, np.nan)
    verif = np.full(shape, np.nan)
    for ln in fh:
        if not ln.strip():
            continue
        i, j, a, b = ln.split()
        s = graph.slot_of(int(j), int(i))
        if s < 0:
            raise InvalidArgument(f"edge ({i}, {j}) not in graph")
        ident[int(j), s] = float(a)
        verif[int(j), s] = float(b)
    if np.isnan(ident).any():
        raise InvalidArgument("phase table does not cover every edge")
    code = np.rint(np.floor(ident / unit + 1e-9)).astype(np.int64)
    return ExactEnsemble(graph, mode, code, unit, ident, verif if mode == SPLIT else None, V)


def write_measurements(y, fh) -> None:
    """One ``re im`` line per complex measurement."""
    for v in np.asarray(y, dtype=complex).tolist():
        fh.write(f"{v.real!r} {v.imag!r}\n")


def read_measurements(fh) -> np.ndarray:
    vals = [tuple(map(float, ln.split())) for ln in fh if ln.strip()]
    return np.array([complex(a, b) for a, b in vals], dtype=complex)
