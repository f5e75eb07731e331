import numpy as np
import pytest

from shofa.graph import LeftRegularGraph


@pytest.fixture
def twin_graph():
    # left nodes 0 and 1 share every neighbour
    return LeftRegularGraph.from_adjacency([[0, 1, 2], [0, 1, 2], [2, 3, 4]], 5)


def dense(v):
    return v.to_dense() if hasattr(v, "to_dense") else np.asarray(v, dtype=float)
