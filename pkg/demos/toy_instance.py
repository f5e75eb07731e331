"""
Peeling a five-entry signal by hand
===================================

Four complex measurements of a length-5 signal with two nonzero entries.
Each leaf measurement's phase names the entry that produced it.
"""

import cmath

import numpy as np

from shofa.exact import decode, encode
from shofa.graph import leaf_fraction, peel_2core
from shofa.worked_example import TOY_SIGNAL, toy_ensemble, toy_graph

ens = toy_ensemble()
y = encode(ens, TOY_SIGNAL)

# identification rows sit at even positions, verification rows at odd ones
for i, v in enumerate(y[0::2]):
    print(f"right node {i}: |y| = {abs(v):.4f}, phase = {cmath.phase(v) / np.pi:.4f} pi")

# node 3 reads pi/6, the code of left node 2, yet it holds two entries;
# verification turns it down, and the two genuine leaves carry the decode
report = decode(ens, y)
print(report.status, "after", report.iterations, "iterations:", report.xhat.to_dense())

g = toy_graph()
print("leaf fraction of {0, 4}:", leaf_fraction(g, {0, 4}))
print("leaf fraction of {1, 4}:", leaf_fraction(g, {1, 4}))
print("peel order for support {1, 3}:", peel_2core(g, {1, 3}).peel_order)
