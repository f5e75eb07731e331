"""
Integer measurement weights
===========================

Replace unit phases by coprime vectors in [M]^R. A leaf group is x_j times
its weight vector, and the ratio to the first component names j.
"""

import numpy as np

from shofa.graph import sample_graph
from shofa.integer import build_int, decode_int, encode_int, enumerate_coprime

for M, R in [(2, 2), (4, 2), (10, 2), (2, 3)]:
    C = enumerate_coprime(M, R)
    print(f"M={M}, R={R}: {len(C)} coprime vectors out of {M ** R}")

n, k = 256, 16
g = sample_graph(n, 2 * k, 3, seed=1)
ens = build_int(g, 16, 2, seed=2)
x = np.zeros(n, dtype=np.int64)
x[np.random.default_rng(3).choice(n, k, replace=False)] = np.arange(1, k + 1)
y = encode_int(ens, x)
print("measurement rows:", y.size, "(integers:", y.dtype, ")")

r = decode_int(ens, y, k=k)
print(r.status, "exact:", np.array_equal(r.xhat.to_dense(), x))
