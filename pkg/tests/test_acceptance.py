"""Acceptance criteria, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``;
every criterion prints one PASS/FAIL line.
"""
import functools
import math
import time
from itertools import combinations

import numpy as np
import pytest

from shofa.exact import COMBINED, SPLIT, build_exact, decode, encode, query, update
from shofa.graph import LeftRegularGraph, peel_2core, sample_graph
from shofa.harness import TrialConfig, minimal_m
from shofa.integer import build_int, decode_int, encode_int, enumerate_coprime
from shofa.noisy import (TruncationPolicy, build_noisy, decode_noisy, default_delta, default_gamma,
                         encode_noisy, phase_noise_bound, simulate_leaf_phase)
from shofa.ops import OpCounter
from shofa.oracle import brute_2core, brute_force_decode
from shofa.signal import NoiseSpec, add_tail, make_sparse_signal, relative_l1_error


def report(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    print(line, flush=True)
    return line


@functools.lru_cache(None)
def criterion_1():
    n, k, d = 1000, 50, 3
    mp = round(1.4 * k)
    t0 = time.perf_counter()
    succ = bad_err = ops_over = 0
    for t in range(1000):
        g = sample_graph(n, mp, d, seed=(1, t, 0))
        ens = build_exact(g, COMBINED, seed=(1, t, 1), k=k)
        x = make_sparse_signal(n, k, "gaussian", seed=(1, t, 2))
        r = decode(ens, encode(ens, x), seed=(1, t, 3), k=k)
        if r.success:
            succ += 1
            bad_err += relative_l1_error(x, r.xhat) > 1e-9
        ops_over += r.ops > 4 * mp + 14 * k
    secs = time.perf_counter() - t0
    rate = succ / 1000
    ok = bad_err == 0 and rate >= 0.9 and secs <= 60
    return ok, (f"success {rate:.3f} (need >= 0.9), {bad_err} successes above 1e-9 error, "
                f"{secs:.1f}s"), ops_over


def criterion_2():
    n, k = 1000, 150
    cs = np.round(np.arange(1.0, 1.601, 0.05), 2)
    rates = []
    for c in cs:
        mp = round(c * k)
        ok = 0
        for t in range(400):
            g = sample_graph(n, mp, 3, seed=(2, int(c * 100), t, 0))
            ens = build_exact(g, COMBINED, seed=(2, int(c * 100), t, 1), k=k)
            x = make_sparse_signal(n, k, "ones", seed=(2, int(c * 100), t, 2))
            ok += decode(ens, encode(ens, x), seed=t, k=k).success
        rates.append(ok / 400)
    rates = np.array(rates)
    i = int(np.argmax(rates >= 0.5))
    if i == 0:
        cross = cs[0]
    else:
        c0, c1, r0, r1 = cs[i - 1], cs[i], rates[i - 1], rates[i]
        cross = c0 + (0.5 - r0) * (c1 - c0) / (r1 - r0)
    ok = abs(cross - 1.22) <= 0.1
    curve = " ".join(f"{c:.2f}:{r:.2f}" for c, r in zip(cs, rates))
    return ok, f"50% crossing at c = {cross:.3f} (need 1.22 +/- 0.1); {curve}"


def criterion_3():
    n, k = 1000, 150
    ok = 0
    for t in range(400):
        ens = build_exact(sample_graph(n, 450, 3, seed=(3, t, 0)), COMBINED, seed=(3, t, 1), k=k)
        x = make_sparse_signal(n, k, "ones", seed=(3, t, 2))
        r = decode(ens, encode(ens, x), seed=t, k=k)
        ok += r.success and relative_l1_error(x, r.xhat) <= 1e-9
    return ok / 400 >= 0.95, f"success {ok / 400:.3f} at m = 450 combined (need >= 0.95)"


def criterion_4():
    t0 = time.perf_counter()
    ms = {}
    for n in (100, 1000, 10_000):
        m, _ = minimal_m(TrialConfig(codec="exact", mode=COMBINED, n=n, k=20, trials=400, seed=4,
                                     value_gen="ones"), target=0.95)
        ms[n] = m
    spread = (max(ms.values()) - min(ms.values())) / min(ms.values())
    secs = time.perf_counter() - t0
    ok = spread <= 0.2 and secs <= 900
    return ok, f"minimal m {ms}, spread {spread:.1%} (need <= 20%), {secs:.0f}s"


@functools.lru_cache(None)
def criterion_5():
    n, k, d, sz, se = 1000, 20, 3, 0.03, 0.01
    mp = 4 * k
    gamma = default_gamma(n, noisy=True)
    spec = NoiseSpec(sz, se)
    delta = default_delta(n, k, mp, d, sz, se)
    good, ratios, max_it = 0, [], 0
    for t in range(200):
        g = sample_graph(n, mp, d, seed=(5, t, 0))
        ens = build_noisy(g, gamma, seed=(5, t, 1))
        x = make_sparse_signal(n, k, "ones", seed=(5, t, 2))
        xz = add_tail(x, spec, seed=(5, t, 3))
        clean = encode_noisy(ens, xz)
        y = encode_noisy(ens, xz, spec, seed=(5, t, 4))
        r = decode_noisy(ens, y, TruncationPolicy(delta), k, seed=(5, t, 5))
        xd = x.to_dense()
        err = np.abs(r.xhat.to_dense() - xd).sum()
        good += err / np.abs(xd).sum() <= 0.3
        z1 = np.abs(xz - xd).sum()
        e1 = np.abs(y - clean).sum()
        ratios.append(err / (z1 + math.sqrt(math.log(k)) * e1))
        max_it = max(max_it, r.iterations)
    frac, mean_ratio = good / 200, float(np.mean(ratios))
    ok = frac >= 0.8 and mean_ratio <= 10
    return ok, (f"{frac:.3f} of trials within 0.3 relative L1 (need >= 0.8), mean error ratio "
                f"{mean_ratio:.3f} (need <= 10; empirical envelope), Gamma={gamma}"), max_it


def criterion_6():
    t0 = time.perf_counter()
    cases = mism = 0
    for n in range(1, 9):
        for mp in range(3, 9):
            for gs in range(4):
                g = sample_graph(n, mp, 3, seed=(6, n, mp, gs))
                for size in range(n + 1):
                    for S in combinations(range(n), size):
                        cases += 1
                        mism += brute_2core(g, S) != peel_2core(g, S).empty_core
    agree = checked = wrong = 0
    for t in range(500):
        n = 8 + t % 5
        k = 1 + t % 2
        ens = build_exact(sample_graph(n, 8, 3, seed=(6, t, 0)), SPLIT if t % 2 else COMBINED,
                          seed=(6, t, 1))
        x = make_sparse_signal(n, k, "gaussian", seed=(6, t, 2))
        y = encode(ens, x)
        r = decode(ens, y, seed=t)
        o = brute_force_decode(ens, y, 2)
        if r.success and o.unique:
            checked += 1
            if np.allclose(o.solutions[0].to_dense(), r.xhat.to_dense(), atol=1e-8):
                agree += 1
            else:
                wrong += 1
    secs = time.perf_counter() - t0
    ok = mism == 0 and wrong == 0 and secs <= 120
    return ok, (f"2-core: {mism} mismatches over {cases} supports; decode vs oracle: "
                f"{agree}/{checked} agree on 500 instances; {secs:.0f}s")


def criterion_7():
    _, _, ops_over = criterion_1()
    _, _, max_it = criterion_5()
    g = sample_graph(1000, 70, 3, seed=7)
    enc_ok = upd_ok = True
    for mode, rows in ((SPLIT, 2), (COMBINED, 1)):
        ens = build_exact(g, mode, seed=8)
        c = OpCounter()
        encode(ens, np.random.default_rng(0).standard_normal(1000), counter=c)
        enc_ok &= c.count == rows * 3 * 1000
        c = OpCounter()
        update(ens, np.zeros(ens.m, complex), 5, 2.0, counter=c)
        upd_ok &= c.count == rows * 3
    ok = ops_over == 0 and max_it <= 80 and enc_ok and upd_ok
    return ok, (f"decode over 4m'+14k on {ops_over} of 1000 trials; encode = r*d*n: {enc_ok}; "
                f"update = r*d: {upd_ok}; noisy max iterations {max_it} (cap 4k = 80)")


def criterion_8():
    n, k, d = 10_000, 100, 3
    mp = 6 * k
    answered = wrong = 0
    total = 0
    for t in range(100):
        ens = build_exact(sample_graph(n, mp, d, seed=(8, t, 0)), COMBINED, seed=(8, t, 1), k=k)
        x = make_sparse_signal(n, k, "gaussian", seed=(8, t, 2))
        y = encode(ens, x)
        xd = x.to_dense()
        off = np.setdiff1d(np.arange(n), x.indices)
        for j in np.random.default_rng((8, t)).choice(off, 100, replace=False).tolist():
            total += 1
            a = query(ens, y, j)
            if a.answered:
                answered += 1
                wrong += abs(a.value - xd[j]) > 1e-9
        for j in x.indices.tolist():
            a = query(ens, y, j)
            if a.answered:
                wrong += abs(a.value - xd[j]) > 1e-9 * max(1, abs(xd[j]))
    frac = answered / total
    ok = frac >= 1 - (d / 6) ** d and wrong == 0
    return ok, f"answered {frac:.4f} of {total} queries (need >= 0.875), {wrong} incorrect answers"


def criterion_9():
    counts = {}
    bounds_ok = True
    for M, R in ((2, 2), (4, 2), (10, 2), (2, 3)):
        c = len(enumerate_coprime(M, R))
        counts[(M, R)] = c
        bounds_ok &= M ** R / 2 <= c <= M ** R
    n, k = 256, 16
    ok_trials = 0
    for t in range(400):
        g = sample_graph(n, 2 * k, 3, seed=(9, t, 0))
        ens = build_int(g, 16, 2, seed=(9, t, 1))
        x = make_sparse_signal(n, k, "gaussian", seed=(9, t, 2))
        r = decode_int(ens, encode_int(ens, x.to_dense()), seed=t, k=k)
        ok_trials += r.success and relative_l1_error(x, r.xhat) <= 1e-9
    rate = ok_trials / 400
    return bounds_ok and rate >= 0.9, f"|C| {counts} within [M^R/2, M^R]: {bounds_ok}; int success {rate:.3f}"


def criterion_10():
    n, d = 1000, 3
    points = [(20, 4, 0.003, 0.001), (20, 4, 0.01, 0.005), (50, 3, 0.02, 0.01)]
    ok, parts = True, []
    for idx, (k, c, sz, se) in enumerate(points):
        delta = float(k)  # leaf magnitude delta/k = 1
        bound, _ = phase_noise_bound(delta, k, n, c, d, sz, se, 1.0)
        dth = simulate_leaf_phase(delta / k, n, c * k, d, sz, se, 100_000, seed=(10, idx))
        ok &= dth.mean() <= bound
        tails = []
        for alpha in (2, 3):
            _, tail = phase_noise_bound(delta, k, n, c, d, sz, se, alpha)
            ex = float(np.mean(dth > alpha * bound))
            ok &= ex <= tail
            tails.append(f"a={alpha}:{ex:.2g}<={tail:.3f}")
        parts.append(f"mean {dth.mean():.4f}<={bound:.4f} " + " ".join(tails))
    return ok, "; ".join(parts)


CRITERIA = {
    1: lambda: criterion_1()[:2],
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: lambda: criterion_5()[:2],
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


@pytest.mark.slow
@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    ok, detail = CRITERIA[num]()
    with capsys.disabled():
        print()
        report(num, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = {}
    for num, fn in CRITERIA.items():
        ok, detail = fn()
        results[num] = ok
        report(num, ok, detail)
    print(f"{sum(results.values())}/{len(results)} criteria pass")
