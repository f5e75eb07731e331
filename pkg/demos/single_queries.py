"""
Reading one entry without decoding the rest
===========================================

A query looks at the d measurements touching entry j. A zero among them means
x_j = 0; a clean leaf gives the value; anything else is declined.
"""

import numpy as np

from shofa.exact import COMBINED, build_exact, encode, query
from shofa.graph import sample_graph
from shofa.signal import make_sparse_signal

n, k, d = 10_000, 100, 3
ens = build_exact(sample_graph(n, 6 * k, d, seed=0), COMBINED, seed=1, k=k)
x = make_sparse_signal(n, k, "gaussian", seed=2)
y = encode(ens, x)

j = int(x.indices[0])
print("x_j =", x.values[0], "query ->", query(ens, y, j))

probe = np.random.default_rng(3).choice(n, 2000, replace=False)
answers = [query(ens, y, int(i)) for i in probe]
print("answered fraction:", np.mean([a.answered for a in answers]),
      "lower bound:", 1 - (d / 6) ** d)
