"""Noise-robust variant: Gamma repeated digit measurements and quantized phases.

Each right node owns 2*Gamma rows: Gamma identification rows, the gamma-th of
which encodes digit g_gamma(j) of the base-B expansion of j as the phase
g_gamma(j) * pi / (2(B-1)), followed by Gamma verification rows with random
phases on the same grid. Row layout of a measurement vector is
(I_1..I_Gamma, V_1..V_Gamma) per right node.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument
from .exact import ITERATION_CAP, SUCCESS, DecodeReport, _LeafSet, _sparse
from .graph import LeftRegularGraph
from .signal import NoiseSpec, make_rng


def base_size(n: int, gamma: int) -> int:
    """Smallest B with B**gamma >= n, i.e. ceil(n ** (1/gamma)) without rounding slop."""
    b = max(1, int(math.ceil(n ** (1.0 / gamma))))
    while b > 1 and (b - 1) ** gamma >= n:
        b -= 1
    while b ** gamma < n:
        b += 1
    return b


def default_gamma(n: int, noisy: bool = False) -> int:
    """Digits per index. Noiseless: keep B <= 256. Noisy: binary digits."""
    if noisy:
        return max(1, math.ceil(math.log2(n)))
    return max(1, math.ceil(math.log2(n) / 8))


def digits(j: int, gamma: int, base: int) -> tuple:
    """Base-``base`` digits of j, most significant first."""
    out = []
    for _ in range(gamma):
        j, r = divmod(j, base)
        out.append(r)
    return tuple(reversed(out))


def from_digits(g, base: int) -> int:
    j = 0
    for v in g:
        j = j * base + int(v)
    return j


def quantize_phase(angle: float, base: int):
    """Nearest grid digit for ``angle mod pi`` on the grid k*pi/(2(B-1)), k < B.

    Angles between pi/2 and pi are snapped to whichever end of the grid is
    closer on the circle, so a small negative displacement of digit 0 still
    reads as 0.
    """
    half = 2 * (base - 1)
    q = int(round(half * (angle % math.pi) / math.pi)) % half
    if q > base - 1:
        q = base - 1 if q - (base - 1) <= half - q else 0
    return q, q * math.pi / half


@dataclass(frozen=True)
class NoisyEnsemble:
    graph: LeftRegularGraph
    Gamma: int
    base: int
    ident_digits: np.ndarray  # (n, Gamma)
    verif_levels: np.ndarray  # (n, d, Gamma) grid indices in [0, B)
    coef: np.ndarray = field(init=False, repr=False)  # (n, d, 2*Gamma)
    coef_list: list = field(init=False, repr=False)

    def __post_init__(self):
        u = self.unit
        n, d = self.graph.n_left, self.graph.degree
        ident = np.broadcast_to(self.ident_digits[:, None, :], (n, d, self.Gamma))
        c = np.exp(1j * u * np.concatenate([ident, self.verif_levels], axis=2))
        object.__setattr__(self, "coef", c)
        object.__setattr__(self, "coef_list", c.tolist())

    @property
    def unit(self) -> float:
        return math.pi / (2 * (self.base - 1))

    @property
    def n(self) -> int:
        return self.graph.n_left

    @property
    def m(self) -> int:
        return 2 * self.Gamma * self.graph.n_right

    def dense_matrix(self) -> np.ndarray:
        g = self.graph
        G2 = 2 * self.Gamma
        A = np.zeros((self.m, g.n_left), dtype=complex)
        for j in range(g.n_left):
            for s, i in enumerate(g.adj_list[j]):
                A[G2 * i:G2 * (i + 1), j] = self.coef[j, s]
        return A


def build_noisy(graph: LeftRegularGraph, Gamma: int, seed=0) -> NoisyEnsemble:
    if Gamma < 1:
        raise InvalidArgument("Gamma must be at least 1")
    n = graph.n_left
    B = base_size(n, Gamma)
    if B < 2:
        raise InvalidArgument(f"base {B} too small for n={n}, Gamma={Gamma}")
    dig = np.array([digits(j, Gamma, B) for j in range(n)], dtype=np.int64).reshape(n, Gamma)
    levels = make_rng(seed).integers(0, B, size=(n, graph.degree, Gamma))
    return NoisyEnsemble(graph, Gamma, B, dig, levels)


def encode_noisy(ens: NoisyEnsemble, x_plus_z, e_spec: NoiseSpec = NoiseSpec(), seed=0) -> np.ndarray:
    """y = A(x + z) + e with e complex Gaussian, sigma_e per axis."""
    v = np.asarray(x_plus_z, dtype=float)
    if v.shape != (ens.n,):
        raise InvalidArgument("signal length does not match ensemble")
    g = ens.graph
    G2 = 2 * ens.Gamma
    y = np.zeros((g.n_right, G2), dtype=complex)
    np.add.at(y, g.adjacency.ravel(), (ens.coef * v[:, None, None]).reshape(-1, G2))
    y = y.ravel()
    if e_spec.sigma_e > 0:
        rng = make_rng(seed)
        y = y + e_spec.sigma_e * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))
    return y


@dataclass(frozen=True)
class TruncationPolicy:
    """Entries with |x_j| < delta/k are not recovered."""
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise InvalidArgument("delta must be positive")


def measurement_noise_scale(n, k, m_prime, d, sigma_z, sigma_e) -> float:
    """sqrt(d n sigma_z^2 / (c k) + sigma_e^2) with c k = m'."""
    return math.sqrt(d * n * sigma_z ** 2 / m_prime + sigma_e ** 2)


def default_delta(n, k, m_prime, d, sigma_z, sigma_e, multiple=3.0) -> float:
    """delta/k sits ``multiple`` noise standard deviations above zero."""
    return multiple * k * measurement_noise_scale(n, k, m_prime, d, sigma_z, sigma_e)


def truncation_set(x, policy: TruncationPolicy, k: int):
    """Indices with |x_j| < delta/k, and the l1 mass sitting there."""
    x = np.asarray(x, dtype=float)
    idx = np.flatnonzero(np.abs(x) < policy.delta / k)
    return idx, float(np.abs(x[idx]).sum())


class _NoisyState:
    def __init__(self, ens, y, threshold):
        G = ens.Gamma
        y = np.asarray(y, dtype=complex)
        if y.shape != (ens.m,):
            raise InvalidArgument(f"expected {ens.m} measurements, got {y.shape}")
        self.ens = ens
        self.G = G
        self.rows = y.reshape(-1, 2 * G).tolist()
        self.thr = threshold
        self.verif = ens.verif_levels.tolist()

    def above(self, i):
        t = self.thr
        return all(abs(v) > t for v in self.rows[i])

    def test(self, i, average=False):
        ens, G = self.ens, self.G
        row = self.rows[i]
        B = ens.base
        g = [quantize_phase(cmath.phase(row[c]), B)[0] for c in range(G)]
        j = from_digits(g, B)
        if j >= ens.n:
            return None
        s = ens.graph.slot_of(j, i)
        if s < 0:
            return None
        lv = self.verif[j][s]
        for c in range(G):
            if quantize_phase(cmath.phase(row[G + c]), B)[0] != lv[c]:
                return None
        theta = cmath.phase(row[0])
        positive = -math.pi / 4 < theta <= 3 * math.pi / 4
        coef = ens.coef_list[j][s]
        if average:
            mag = abs(sum((row[c] * coef[c].conjugate()).real for c in range(G)) / G)
        else:
            mag = abs(row[0])
        value = mag if positive else -mag
        # a genuine leaf leaves only noise behind; a node whose digits merely
        # follow its dominant contributor leaves the others above threshold
        t = self.thr
        if any(abs(row[c] - value * coef[c]) > t for c in range(2 * G)):
            return None
        return j, s, value

    def subtract(self, i, j, s, value):
        row = self.rows[i]
        coef = self.ens.coef_list[j][s]
        for c in range(2 * self.G):
            row[c] -= value * coef[c]


def decode_noisy(ens: NoisyEnsemble, y, policy: TruncationPolicy, k: int, seed=0,
                 iter_cap=None, average_magnitude=False) -> DecodeReport:
    """Quantized-phase peeling over the neighbourly set.

    The neighbourly set holds right nodes whose every row exceeds delta/k in
    magnitude. A picked node that fails identification or verification is
    dropped until a later subtraction touches it; after a successful step the d
    neighbours of the recovered index are re-screened against the threshold.
    A candidate also has to explain its whole group: after removing the
    estimated term every row must fall below delta/k. Stops when the set
    empties or after ``iter_cap`` (default 4k) picks.
    """
    k = max(int(k), 1)
    if iter_cap is None:
        iter_cap = 4 * k
    g = ens.graph
    st = _NoisyState(ens, y, policy.delta / k)
    rng = make_rng(seed)
    pool = _LeafSet(g.n_right)
    for i in range(g.n_right):
        if st.above(i):
            pool.add(i)
    xhat = {}
    iterations = 0
    ops = 0
    while len(pool) and iterations < iter_cap:
        i = pool.pick(rng)
        iterations += 1
        ops += 2 * ens.Gamma
        hit = st.test(i, average_magnitude)
        if hit is None:
            pool.discard(i)
            continue
        j, _, value = hit
        xhat[j] = xhat.get(j, 0.0) + value
        for s, i2 in enumerate(g.adj_list[j]):
            st.subtract(i2, j, s, value)
            ops += 4 * ens.Gamma
            if st.above(i2):
                pool.add(i2)
            else:
                pool.discard(i2)
    resid = max((abs(v) for row in st.rows for v in row), default=0.0)
    status = SUCCESS if not len(pool) else ITERATION_CAP
    return DecodeReport(_sparse(g.n_left, xhat), status, iterations, resid, ops)


def phase_noise_bound(delta, k, n, c, d, sigma_z, sigma_e, alpha):
    """Leaf-node phase displacement: (bound on its mean, tail probability beyond alpha*bound)."""
    if not delta > 0:
        raise InvalidArgument("delta must be positive")
    mean = math.sqrt(2 * math.pi * k ** 2 * (d * n * sigma_z ** 2 / (c * k) + sigma_e ** 2) / delta ** 2)
    return mean, 0.5 * math.exp(-alpha ** 2 / (2 * math.pi))


def simulate_leaf_phase(magnitude, n, m_prime, d, sigma_z, sigma_e, samples, seed=0):
    """Phase displacement |angle(y) - angle(x_j a)| on a leaf right node, by simulation.

    Each of the other n-1 signal positions lands on the leaf with probability
    d/m' and contributes a Gaussian tail value times a unit weight with phase in
    [0, pi/2]; complex measurement noise with per-axis std ``sigma_e`` is added.
    """
    rng = make_rng(seed)
    p = d / m_prime
    counts = rng.binomial(n - 1, p, size=samples)
    width = int(counts.max(initial=0))
    mask = np.arange(width)[None, :] < counts[:, None]
    z = rng.standard_normal((samples, width)) * sigma_z * mask
    phi = rng.uniform(0, np.pi / 2, size=(samples, width))
    tail = (z * np.exp(1j * phi)).sum(axis=1)
    e = sigma_e * (rng.standard_normal(samples) + 1j * rng.standard_normal(samples))
    base = rng.uniform(0, np.pi / 2, size=samples)
    y = magnitude * np.exp(1j * base) + tail + e
    return np.abs(np.angle(y * np.exp(-1j * base)))
