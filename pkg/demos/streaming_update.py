"""
Streaming updates
=================

Changing one entry of x touches only the d measurements of that entry, so a
sketch can follow a stream of increments without re-encoding.
"""

import numpy as np

from shofa.exact import SPLIT, build_exact, decode, encode, update
from shofa.graph import sample_graph
from shofa.ops import OpCounter

n = 5000
ens = build_exact(sample_graph(n, 120, 3, seed=0), SPLIT, seed=1, k=60)
rng = np.random.default_rng(2)
x = np.zeros(n)
y = encode(ens, x)
hot = rng.choice(n, 40, replace=False)  # the stream only ever touches these
ops = OpCounter()
for _ in range(200):
    j, delta = int(rng.choice(hot)), float(rng.standard_normal())
    x[j] += delta
    y = update(ens, y, j, delta, counter=ops)
print("ops per update:", ops.count / 200)
print("drift from a fresh encode:", np.max(np.abs(y - encode(ens, x))))
r = decode(ens, y)
print(r.status, "nonzeros:", r.xhat.nnz, "max error:", np.max(np.abs(r.xhat.to_dense() - x)))
