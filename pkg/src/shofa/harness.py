"""Monte-Carlo trial runner, parameter sweeps and CSV output.

``m`` always counts measurement rows of the chosen codec: combined m = m',
split m = 2m', noisy m = 2*Gamma*m', integer m = 2*R*m'.
"""
from __future__ import annotations

import csv
import dataclasses
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import exact, integer, noisy
from .errors import InvalidArgument, UndefinedRatio
from .graph import sample_graph
from .signal import NoiseSpec, add_tail, make_sparse_signal, relative_l1_error

EXACT, NOISY, INT = "exact", "noisy", "int"

CSV_HEADER = ["codec", "n", "k", "m", "d", "gamma", "M", "R", "mode", "sigma_z", "sigma_e",
              "trials", "seed", "success_fraction", "mean_iterations", "mean_rel_l1", "wall_ms"]


@dataclass(frozen=True)
class ExactRecovery:
    tol: float = 1e-9


@dataclass(frozen=True)
class RelativeL1:
    threshold: float = 0.3


@dataclass(frozen=True)
class TrialConfig:
    codec: str = EXACT
    n: int = 1000
    k: int = 10
    m_prime: int = 30
    d: int = 3
    Gamma: int | None = None
    M: int = 16
    R: int = 2
    mode: str = exact.COMBINED
    sigma_z: float = 0.0
    sigma_e: float = 0.0
    delta_override: float | None = None
    trials: int = 100
    seed: int = 0
    success_criterion: object = field(default_factory=ExactRecovery)
    value_gen: str = "ones"

    @property
    def gamma(self) -> int:
        return self.Gamma if self.Gamma is not None else noisy.default_gamma(self.n, noisy=True)

    @property
    def rows_per_node(self) -> int:
        if self.codec == NOISY:
            return 2 * self.gamma
        if self.codec == INT:
            return 2 * self.R
        return 2 if self.mode == exact.SPLIT else 1

    @property
    def m(self) -> int:
        return self.rows_per_node * self.m_prime

    def validate(self) -> TrialConfig:
        if self.codec not in (EXACT, NOISY, INT):
            raise InvalidArgument(f"unknown codec {self.codec!r}")
        if self.trials < 1:
            raise InvalidArgument("trials must be at least 1")
        if not 0 <= self.k <= self.n:
            raise InvalidArgument("need 0 <= k <= n")
        if self.d < 1 or self.d > self.m_prime:
            raise InvalidArgument(f"degree {self.d} incompatible with m'={self.m_prime}")
        if self.codec == EXACT and self.mode not in (exact.SPLIT, exact.COMBINED):
            raise InvalidArgument(f"unknown mode {self.mode!r}")
        if self.codec == EXACT and (self.sigma_z or self.sigma_e):
            raise InvalidArgument("the exact codec takes no noise")
        if self.codec == INT and (self.M < 2 or self.R < 1):
            raise InvalidArgument("integer codec needs M >= 2, R >= 1")
        if self.codec == NOISY and noisy.base_size(self.n, self.gamma) < 2:
            raise InvalidArgument("Gamma too large for n")
        if self.delta_override is not None and not self.delta_override > 0:
            raise InvalidArgument("delta_override must be positive")
        if self.sigma_z < 0 or self.sigma_e < 0:
            raise InvalidArgument("noise levels must be nonnegative")
        return self

    def with_m(self, m: int) -> TrialConfig:
        """Same config with m' chosen so that total rows = m (rounded down, at least d)."""
        mp = max(self.d, int(m) // self.rows_per_node)
        return dataclasses.replace(self, m_prime=mp)


@dataclass(frozen=True)
class TrialRecord:
    success: bool
    iterations: int
    rel_l1: float
    ops: int
    status: str


@dataclass(frozen=True)
class SweepResult:
    config: TrialConfig
    success_fraction: float
    mean_iterations: float
    mean_rel_l1: float
    wall_ms: float

    def row(self) -> list:
        c = self.config
        return [c.codec, c.n, c.k, c.m, c.d, c.gamma if c.codec == NOISY else "",
                c.M if c.codec == INT else "", c.R if c.codec == INT else "",
                c.mode if c.codec == EXACT else "", c.sigma_z, c.sigma_e, c.trials, c.seed,
                repr(self.success_fraction), repr(self.mean_iterations), repr(self.mean_rel_l1),
                f"{self.wall_ms:.1f}"]


def trial_seeds(cfg: TrialConfig, trial_index: int, count=6):
    """Independent child seeds for one trial, a pure function of (cfg.seed, trial_index)."""
    return np.random.SeedSequence(cfg.seed, spawn_key=(trial_index,)).spawn(count)


def run_trial(cfg: TrialConfig, trial_index: int) -> TrialRecord:
    s_graph, s_ens, s_sig, s_tail, s_noise, s_dec = trial_seeds(cfg, trial_index)
    g = sample_graph(cfg.n, cfg.m_prime, cfg.d, seed=s_graph)
    x = make_sparse_signal(cfg.n, cfg.k, cfg.value_gen, seed=s_sig)
    xd = x.to_dense()
    if cfg.codec == EXACT:
        ens = exact.build_exact(g, cfg.mode, seed=s_ens, k=cfg.k)
        rep = exact.decode(ens, exact.encode(ens, x), seed=s_dec, k=cfg.k)
    elif cfg.codec == INT:
        ens = integer.build_int(g, cfg.M, cfg.R, seed=s_ens)
        rep = integer.decode_int(ens, integer.encode_int(ens, xd), seed=s_dec, k=cfg.k)
    else:
        spec = NoiseSpec(cfg.sigma_z, cfg.sigma_e)
        ens = noisy.build_noisy(g, cfg.gamma, seed=s_ens)
        y = noisy.encode_noisy(ens, add_tail(x, spec, seed=s_tail), spec, seed=s_noise)
        delta = cfg.delta_override or noisy.default_delta(
            cfg.n, max(cfg.k, 1), cfg.m_prime, cfg.d, cfg.sigma_z, cfg.sigma_e)
        rep = noisy.decode_noisy(ens, y, noisy.TruncationPolicy(delta), max(cfg.k, 1), seed=s_dec)
    try:
        err = relative_l1_error(xd, rep.xhat)
    except UndefinedRatio:
        err = math.inf
    crit = cfg.success_criterion
    if isinstance(crit, ExactRecovery):
        ok = rep.success and err <= crit.tol
    else:
        ok = err <= crit.threshold
    return TrialRecord(bool(ok), rep.iterations, err, rep.ops, rep.status)


def _run_point(cfg, executor=None):
    t0 = time.perf_counter()
    if executor is None:
        recs = [run_trial(cfg, t) for t in range(cfg.trials)]
    else:
        recs = list(executor.map(run_trial, itertools.repeat(cfg), range(cfg.trials),
                                 chunksize=max(1, cfg.trials // 32)))
    wall = (time.perf_counter() - t0) * 1e3
    succ = sum(r.success for r in recs)
    return SweepResult(cfg, succ / cfg.trials, float(np.mean([r.iterations for r in recs])),
                       float(np.mean([r.rel_l1 for r in recs])), wall)


def run_point(cfg: TrialConfig, threads: int = 1) -> SweepResult:
    cfg.validate()
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            return _run_point(cfg, ex)
    return _run_point(cfg)


def sweep(grid, threads: int = 1):
    """Yield one SweepResult per grid point, in order."""
    grid = list(grid)
    if not grid:
        raise InvalidArgument("empty grid")
    for cfg in grid:
        cfg.validate()
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            for cfg in grid:
                yield _run_point(cfg, ex)
    else:
        for cfg in grid:
            yield _run_point(cfg)


def write_csv(results, fh) -> int:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    count = 0
    for r in results:
        w.writerow(r.row())
        fh.flush()
        count += 1
    return count


def minimal_m(cfg: TrialConfig, target=0.95, lo=None, hi=None, threads=1):
    """Smallest total row count m whose success fraction reaches ``target``.

    Bisection over m' (success is treated as monotone in m). Returns (m, result).
    """
    lo_p = max(cfg.d, (lo or cfg.d) // cfg.rows_per_node)
    hi_p = max(lo_p, (hi or 16 * max(cfg.k, 1) * cfg.rows_per_node) // cfg.rows_per_node)
    cache = {}

    def probe(mp):
        if mp not in cache:
            cache[mp] = run_point(dataclasses.replace(cfg, m_prime=mp), threads)
        return cache[mp]

    while probe(hi_p).success_fraction < target:
        hi_p *= 2
        if hi_p > 1 << 20:
            raise InvalidArgument("target success rate never reached")
    if probe(lo_p).success_fraction >= target:
        return lo_p * cfg.rows_per_node, probe(lo_p)
    while hi_p - lo_p > 1:
        mid = (lo_p + hi_p) // 2
        if probe(mid).success_fraction >= target:
            hi_p = mid
        else:
            lo_p = mid
    return hi_p * cfg.rows_per_node, probe(hi_p)


# config files

_INT_KEYS = {"n", "k", "m_prime", "d", "Gamma", "M", "R", "trials", "seed", "m"}
_FLOAT_KEYS = {"sigma_z", "sigma_e", "delta_override", "c"}
_ALIASES = {"gamma": "Gamma", "m'": "m_prime", "mprime": "m_prime", "criterion": "success_criterion"}


def _coerce(key, raw):
    if key in _INT_KEYS:
        return int(round(float(raw)))
    if key in _FLOAT_KEYS:
        return float(raw)
    if key == "success_criterion":
        name, _, arg = raw.replace("(", " ").replace(")", " ").partition(" ")
        name = name.strip().lower()
        if name in ("exact", "exactrecovery"):
            return ExactRecovery(float(arg) if arg.strip() else 1e-9)
        if name in ("relative_l1", "relativel1", "rel_l1"):
            return RelativeL1(float(arg) if arg.strip() else 0.3)
        raise InvalidArgument(f"unknown success criterion {raw!r}")
    return raw


def _axis(tokens, line):
    if len(tokens) not in (5, 6) or (len(tokens) == 6 and tokens[5] != "log"):
        raise InvalidArgument(f"bad sweep line: {line!r}")
    key = _ALIASES.get(tokens[1], tokens[1])
    start, stop, steps = float(tokens[2]), float(tokens[3]), int(tokens[4])
    if len(tokens) == 6:
        vals = np.geomspace(start, stop, steps)
    else:
        vals = np.linspace(start, stop, steps)
    return key, [_coerce(key, repr(float(v))) for v in vals]


def _section_grid(lines, overrides):
    keys, axes = {}, []
    for line in lines:
        tokens = line.split()
        if tokens[0] == "sweep":
            axes.append(_axis(tokens, line))
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise InvalidArgument(f"expected 'key = value': {line!r}")
        key = _ALIASES.get(key.strip(), key.strip())
        keys[key] = _coerce(key, val.strip())
    keys.update(overrides)
    fields = {f.name for f in dataclasses.fields(TrialConfig)}
    out = []
    for combo in itertools.product(*[vals for _, vals in axes]):
        kv = dict(keys)
        kv.update(zip([k for k, _ in axes], combo))
        m = kv.pop("m", None)
        c = kv.pop("c", None)
        bad = set(kv) - fields
        if bad:
            raise InvalidArgument(f"unknown config keys {sorted(bad)}")
        cfg = TrialConfig(**kv)
        if c is not None:
            cfg = dataclasses.replace(cfg, m_prime=max(cfg.d, int(round(c * cfg.k))))
        if m is not None:
            cfg = cfg.with_m(m)
        out.append(cfg.validate())
    return out


def parse_config(text: str, overrides=None):
    """Grid of TrialConfigs from ``key = value`` / ``sweep key start stop steps [log]`` text.

    Several sweep lines form a product grid, first line outermost. A line of
    ``---`` starts an independent section; the grids of all sections are
    concatenated. ``m`` (total rows) and ``c`` (m'/k) are accepted in place of
    ``m_prime``. ``overrides`` replaces file keys in every section.
    """
    overrides = dict(overrides or {})
    sections, cur = [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line == "---":
            sections.append(cur)
            cur = []
        elif line:
            cur.append(line)
    sections.append(cur)
    grid = []
    for sec in sections:
        if sec:
            grid.extend(_section_grid(sec, overrides))
    if not grid:
        raise InvalidArgument("config defines no grid points")
    return grid
