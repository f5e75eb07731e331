"""Test signals, tail noise and error metrics shared by every codec."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UndefinedRatio


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator (Philox) so every experiment replays bit-identically."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class SparseVector:
    length: int
    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=float)
        if idx.shape != val.shape or idx.ndim != 1:
            raise InvalidArgument("indices and values must be 1-d and of equal length")
        if idx.size and (idx[0] < 0 or idx[-1] >= self.length or np.any(np.diff(idx) <= 0)):
            raise InvalidArgument("indices must be strictly increasing and inside [0, length)")
        if np.any(val == 0):
            raise InvalidArgument("stored values must be nonzero")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, x) -> SparseVector:
        x = np.asarray(x, dtype=float)
        idx = np.flatnonzero(x)
        return cls(x.size, idx, x[idx])

    @classmethod
    def zeros(cls, n: int) -> SparseVector:
        return cls(n, np.empty(0, np.int64), np.empty(0))

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def support(self) -> set[int]:
        return set(self.indices.tolist())

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.length)
        out[self.indices] = self.values
        return out


@dataclass(frozen=True)
class NoiseSpec:
    sigma_z: float = 0.0  # std-dev of tail entries off the support
    sigma_e: float = 0.0  # per-axis std-dev of complex measurement noise

    def __post_init__(self):
        if self.sigma_z < 0 or self.sigma_e < 0:
            raise InvalidArgument("noise levels must be nonnegative")

    @property
    def exact(self) -> bool:
        return self.sigma_z == 0 and self.sigma_e == 0


def _draw_values(value_gen, k, rng):
    if callable(value_gen):
        vals = np.asarray(value_gen(rng, k), dtype=float)
    elif value_gen in ("ones", "constant-1"):
        vals = np.ones(k)
    elif value_gen == "gaussian":
        vals = rng.standard_normal(k)
    elif value_gen == "signs":
        vals = rng.choice([-1.0, 1.0], size=k)
    elif value_gen == "uniform":
        # magnitudes in [1, 2) with random signs
        vals = (1.0 + rng.random(k)) * rng.choice([-1.0, 1.0], size=k)
    else:
        raise InvalidArgument(f"unknown value distribution {value_gen!r}")
    if vals.shape != (k,) or np.any(vals == 0):
        raise InvalidArgument("value generator must emit k nonzero values")
    return vals


def make_sparse_signal(n: int, k: int, value_gen="ones", seed=0) -> SparseVector:
    """Exactly k nonzeros at uniformly chosen distinct positions.

    ``value_gen`` is one of ``"ones"``, ``"gaussian"``, ``"signs"``, ``"uniform"``
    or a callable ``(rng, k) -> values``.
    """
    if k < 0 or k > n:
        raise InvalidArgument(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = make_rng(seed)
    idx = np.sort(rng.choice(n, size=k, replace=False)) if k else np.empty(0, np.int64)
    return SparseVector(n, idx, _draw_values(value_gen, k, rng))


def add_tail(x: SparseVector, spec: NoiseSpec, seed=0) -> np.ndarray:
    """Dense x + z with z ~ N(0, sigma_z^2) i.i.d. off the support of x."""
    dense = x.to_dense()
    if spec.sigma_z == 0:
        return dense
    z = spec.sigma_z * make_rng(seed).standard_normal(x.length)
    z[x.indices] = 0.0
    return dense + z


def _as_dense(v) -> np.ndarray:
    if isinstance(v, SparseVector):
        return v.to_dense()
    return np.asarray(v, dtype=float)


def relative_l1_error(x, xhat) -> float:
    """||x - xhat||_1 / ||x||_1, with 0 when both vectors vanish."""
    x, xhat = _as_dense(x), _as_dense(xhat)
    if x.shape != xhat.shape:
        raise InvalidArgument("length mismatch")
    den = np.abs(x).sum()
    num = np.abs(x - xhat).sum()
    if den == 0:
        if num == 0:
            return 0.0
        raise UndefinedRatio("reference vector is zero but estimate is not")
    return float(num / den)
