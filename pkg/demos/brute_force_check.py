"""
Checking the decoder against exhaustive search
==============================================

On tiny instances every support of size <= 2 can be tried. When exhaustive
search finds a single consistent signal, the peeling decoder must return it.
"""

import numpy as np

from shofa.exact import SPLIT, build_exact, decode, encode
from shofa.graph import peel_2core, sample_graph
from shofa.oracle import brute_2core, brute_force_decode
from shofa.signal import make_sparse_signal

agree = unique = 0
for t in range(100):
    ens = build_exact(sample_graph(12, 8, 3, seed=(t, 0)), SPLIT, seed=(t, 1))
    x = make_sparse_signal(12, 2, "gaussian", seed=(t, 2))
    y = encode(ens, x)
    r, o = decode(ens, y, seed=t), brute_force_decode(ens, y, 2)
    if o.unique and r.success:
        unique += 1
        agree += np.allclose(o.solutions[0].to_dense(), r.xhat.to_dense())
print(f"decode matches the unique oracle solution in {agree}/{unique} cases")

g = sample_graph(8, 6, 3, seed=5)
S = [0, 2, 3, 6]
print("2-core empty by peeling:", peel_2core(g, S).empty_core,
      "by definition:", brute_2core(g, S))
