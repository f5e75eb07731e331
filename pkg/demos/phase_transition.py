"""
Where peeling starts to work
============================

Success of the exact decoder against c = m'/k for degree-3 graphs. The sharp
rise near c = 1.22 is the point where random 3-uniform hypergraphs lose their
2-core.
"""

import numpy as np

from shofa.exact import COMBINED, build_exact, decode, encode
from shofa.graph import peel_2core, sample_graph
from shofa.signal import make_sparse_signal

n, k, trials = 1000, 150, 100

for c in np.arange(1.0, 1.61, 0.1):
    mp = round(c * k)
    wins = cores = 0
    for t in range(trials):
        g = sample_graph(n, mp, 3, seed=(t, 0))
        x = make_sparse_signal(n, k, "ones", seed=(t, 1))
        ens = build_exact(g, COMBINED, seed=(t, 2), k=k)
        wins += decode(ens, encode(ens, x), seed=t, k=k).success
        cores += peel_2core(g, x.support()).empty_core
    # decoder and pure graph peeling agree trial by trial
    print(f"c = {c:.2f}  decode {wins / trials:.2f}  empty 2-core {cores / trials:.2f}")
