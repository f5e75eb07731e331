"""A five-signal, four-measurement toy instance small enough to trace by hand.

Left nodes are 0..4 and right nodes 0..3. Identification phases are multiples
of pi/6 chosen per edge so that, for x = (0, 1, 0, 1, 0):

- right node 0 is a leaf for left node 3 and reads phase pi/3, magnitude 1;
- right node 2 is a leaf for left node 1;
- right node 1 sums two unit terms at phases 0 and pi/2, reading pi/4;
- right node 3 reads phase pi/6 with magnitude sqrt(3). That phase names left
  node 2, a false lead that the verification row rejects.

Left nodes {0, 4} leave half of their four neighbours as leaves, while
{1, 4} share all three neighbours and leave none.
"""
from __future__ import annotations

import numpy as np

from .exact import ExactEnsemble, ensemble_from_codes
from .graph import LeftRegularGraph
from .signal import make_rng

TOY_ADJACENCY = [[0, 1, 2], [1, 2, 3], [0, 2, 3], [0, 1, 3], [1, 2, 3]]
TOY_CODES = [[0, 1, 0], [0, 1, 0], [1, 2, 1], [2, 3, 2], [2, 3, 3]]
TOY_UNIT = np.pi / 6
TOY_SIGNAL = np.array([0.0, 1.0, 0.0, 1.0, 0.0])


def toy_graph() -> LeftRegularGraph:
    return LeftRegularGraph.from_adjacency(TOY_ADJACENCY, 4)


def toy_ensemble(seed=0, grid_V=4096) -> ExactEnsemble:
    """Split-mode ensemble on the toy graph with grid-valued random verification phases."""
    levels = make_rng(seed).integers(0, grid_V, size=(5, 3))
    return ensemble_from_codes(toy_graph(), TOY_CODES, TOY_UNIT, levels * (np.pi / 2 / grid_V), grid_V)
