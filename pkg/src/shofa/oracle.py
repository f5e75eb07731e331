"""Brute-force references for small instances.

Nothing here touches the peeling code: supports are enumerated outright and
2-cores are found straight from their definition.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InfeasibleEnumeration
from .signal import SparseVector

MAX_N = 16
MAX_K = 3
RESID_REL = 1e-8


@dataclass(frozen=True)
class OracleResult:
    solutions: tuple

    @property
    def unique(self) -> bool:
        return len(self.solutions) == 1


def _real_stack(A):
    A = np.asarray(A)
    if np.iscomplexobj(A):
        return np.vstack([A.real, A.imag])
    return A.astype(float)


def brute_force_decode(ens, y, k_max: int) -> OracleResult:
    """Every signal with at most ``k_max`` nonzeros that reproduces y.

    Works on the ensemble's dense matrix, so it accepts any codec. Each support
    is fitted by least squares (normal equations on the real-stacked system);
    fits whose residual is within 1e-8 of max|y|, and whose entries are all
    nonzero, are kept.
    """
    A = ens.dense_matrix()
    n = A.shape[1]
    if n > MAX_N or k_max > MAX_K:
        raise InfeasibleEnumeration(f"n={n}, k_max={k_max} beyond n<={MAX_N}, k<={MAX_K}")
    Ar = _real_stack(A)
    yr = _real_stack(np.asarray(y)[:, None])[:, 0]
    scale = float(np.max(np.abs(y))) if len(y) else 0.0
    tol = RESID_REL * scale
    sols = []
    if scale <= tol or scale == 0.0:
        sols.append(SparseVector.zeros(n))
    for size in range(1, k_max + 1):
        for S in combinations(range(n), size):
            B = Ar[:, S]
            G = B.T @ B
            try:
                v = np.linalg.solve(G, B.T @ yr)
            except np.linalg.LinAlgError:
                continue
            if np.max(np.abs(yr - B @ v)) > tol:
                continue
            if np.min(np.abs(v)) <= tol:
                continue  # already found with a smaller support
            sols.append(SparseVector(n, np.array(S, dtype=np.int64), v))
    return OracleResult(tuple(sols))


def brute_2core(graph, support) -> bool:
    """True when no nonempty subset of ``support`` has all its right neighbours hit twice."""
    S = sorted(set(int(j) for j in support))
    if len(S) > 12 or graph.n_right > 24:
        raise InfeasibleEnumeration("brute_2core needs |support| <= 12 and m' <= 24")
    nbrs = {j: [int(i) for i in graph.adjacency[j]] for j in S}
    for size in range(1, len(S) + 1):
        for T in combinations(S, size):
            hits = {}
            for j in T:
                for i in nbrs[j]:
                    hits[i] = hits.get(i, 0) + 1
            if min(hits.values()) >= 2:
                return False
    return True
