"""Random left-regular bipartite graphs and the structure that governs peeling.

Left nodes are signal coordinates, right nodes are measurement groups. Each left
node has exactly ``degree`` distinct right neighbours.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleEnumeration, InvalidArgument
from .signal import make_rng

EXHAUSTIVE_LIMIT = 20


@dataclass(frozen=True)
class LeftRegularGraph:
    n_left: int
    n_right: int
    degree: int
    adjacency: np.ndarray  # (n_left, degree), each row sorted
    rev_ptr: np.ndarray = field(repr=False, default=None)
    rev_left: np.ndarray = field(repr=False, default=None)
    rev_slot: np.ndarray = field(repr=False, default=None)
    adj_list: list = field(repr=False, default=None)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.int64).reshape(self.n_left, self.degree)
        if adj.size and (adj.min() < 0 or adj.max() >= self.n_right):
            raise InvalidArgument("right-node index out of range")
        adj = np.sort(adj, axis=1)
        if self.degree > 1 and np.any(np.diff(adj, axis=1) == 0):
            raise InvalidArgument("left node with repeated neighbour")
        object.__setattr__(self, "adjacency", adj)
        # reverse adjacency in CSR form, ordered by right node then left node
        flat = adj.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n_right)
        ptr = np.zeros(self.n_right + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        object.__setattr__(self, "rev_ptr", ptr)
        object.__setattr__(self, "rev_left", order // max(self.degree, 1))
        object.__setattr__(self, "rev_slot", order % max(self.degree, 1))
        object.__setattr__(self, "adj_list", adj.tolist())

    @classmethod
    def from_adjacency(cls, adjacency, n_right: int) -> LeftRegularGraph:
        adj = np.atleast_2d(np.asarray(adjacency, dtype=np.int64))
        return cls(adj.shape[0], n_right, adj.shape[1], adj)

    @property
    def m_prime(self) -> int:
        return self.n_right

    def neighbors(self, j: int) -> np.ndarray:
        return self.adjacency[j]

    def right_neighbors(self, i: int) -> np.ndarray:
        return self.rev_left[self.rev_ptr[i]:self.rev_ptr[i + 1]]

    def right_degrees(self) -> np.ndarray:
        return np.diff(self.rev_ptr)

    def slot_of(self, j: int, i: int) -> int:
        """Position of right node ``i`` in ``adjacency[j]``, or -1 if not adjacent."""
        try:
            return self.adj_list[j].index(i)
        except ValueError:
            return -1


def sample_graph(n: int, m_prime: int, d: int, seed=0) -> LeftRegularGraph:
    """Each left node picks d distinct right nodes uniformly, independently."""
    if m_prime < 1 or d < 1:
        raise InvalidArgument("need m_prime >= 1 and d >= 1")
    if d > m_prime:
        raise InvalidArgument(f"degree {d} exceeds number of right nodes {m_prime}")
    rng = make_rng(seed)
    if d * d > m_prime:
        # dense regime: partial permutations
        adj = np.argsort(rng.random((n, m_prime)), axis=1)[:, :d]
    else:
        adj = rng.integers(0, m_prime, size=(n, d))
        while True:
            srt = np.sort(adj, axis=1)
            bad = np.flatnonzero(np.any(srt[:, 1:] == srt[:, :-1], axis=1))
            if bad.size == 0:
                break
            adj[bad] = rng.integers(0, m_prime, size=(bad.size, d))
    return LeftRegularGraph(n, m_prime, d, adj)


@dataclass(frozen=True)
class CoreReport:
    peel_order: list  # (left node, resolving right node) in removal order
    residual_core: frozenset
    empty_core: bool


def peel_2core(graph: LeftRegularGraph, support) -> CoreReport:
    """Peel the sub-hypergraph induced by ``support`` down to its 2-core.

    Ties between degree-1 right nodes are broken by lowest index; the residual
    core does not depend on the order.
    """
    support = sorted(set(int(s) for s in support))
    if support and (support[0] < 0 or support[-1] >= graph.n_left):
        raise InvalidArgument("support outside [0, n_left)")
    count = {}
    xor = {}
    for j in support:
        for i in graph.adjacency[j].tolist():
            count[i] = count.get(i, 0) + 1
            xor[i] = xor.get(i, 0) ^ j
    heap = [i for i, c in count.items() if c == 1]
    heapq.heapify(heap)
    alive = set(support)
    order = []
    while heap:
        i = heapq.heappop(heap)
        if count[i] != 1:
            continue
        j = xor[i]
        order.append((j, i))
        alive.discard(j)
        for r in graph.adjacency[j].tolist():
            count[r] -= 1
            xor[r] ^= j
            if count[r] == 1:
                heapq.heappush(heap, r)
    return CoreReport(order, frozenset(alive), not alive)


def _neighbor_masks(graph, S):
    words = (graph.n_right + 63) // 64
    masks = np.zeros((len(S), words), dtype=np.uint64)
    for row, j in enumerate(S):
        for i in graph.adjacency[j].tolist():
            masks[row, i // 64] |= np.uint64(1) << np.uint64(i % 64)
    return masks


def _expansion_exhaustive(graph, S, factor):
    masks = _neighbor_masks(graph, S)
    s = len(S)
    union = np.zeros((1, masks.shape[1]), dtype=np.uint64)
    sizes = np.zeros(1, dtype=np.int64)
    for b in range(s):
        union = np.concatenate([union, union | masks[b]])
        sizes = np.concatenate([sizes, sizes + 1])
    nb = np.bitwise_count(union).sum(axis=1)
    need = factor * graph.degree * sizes
    return bool(np.all(nb[1:] >= need[1:] - 1e-9))


def check_expansion(graph: LeftRegularGraph, S, factor: float, mode="auto",
                    samples=10_000, seed=0) -> bool:
    """True iff every subset S' of S has |N(S')| >= factor * d * |S'|.

    ``mode="exhaustive"`` enumerates all 2^|S| subsets (|S| <= 20);
    ``mode="sampled"`` checks all singletons plus ``samples`` uniform subsets.
    ``"auto"`` picks exhaustive whenever it is allowed.
    """
    S = sorted(set(int(s) for s in S))
    if mode == "auto":
        mode = "exhaustive" if len(S) <= EXHAUSTIVE_LIMIT else "sampled"
    if mode == "exhaustive":
        if len(S) > EXHAUSTIVE_LIMIT:
            raise InfeasibleEnumeration(f"{2 ** len(S)} subsets exceed the enumeration budget")
        return _expansion_exhaustive(graph, S, factor)
    rng = make_rng(seed)
    need = factor * graph.degree
    if S and graph.degree < need - 1e-9:
        return False
    adj = graph.adjacency[S]
    for _ in range(samples):
        pick = rng.random(len(S)) < 0.5
        size = int(pick.sum())
        if size and np.unique(adj[pick]).size < need * size - 1e-9:
            return False
    return True


def leaf_fraction(graph: LeftRegularGraph, S) -> float:
    """Fraction of N(S) having exactly one neighbour in S."""
    S = sorted(set(int(s) for s in S))
    if not S:
        raise InvalidArgument("S must be nonempty")
    counts = np.bincount(graph.adjacency[S].ravel(), minlength=graph.n_right)
    return float(np.sum(counts == 1) / np.sum(counts > 0))


def write_graph(graph: LeftRegularGraph, fh) -> None:
    """Text format: header ``n m d`` then one line of d neighbours per left node."""
    if isinstance(fh, (str, bytes)) or hasattr(fh, "__fspath__"):
        with open(fh, "w") as f:
            return write_graph(graph, f)
    fh.write(f"{graph.n_left} {graph.n_right} {graph.degree}\n")
    for row in graph.adjacency:
        fh.write(" ".join(map(str, row.tolist())) + "\n")


def read_graph(fh) -> LeftRegularGraph:
    if isinstance(fh, (str, bytes)) or hasattr(fh, "__fspath__"):
        with open(fh) as f:
            return read_graph(f)
    n, m, d = (int(t) for t in fh.readline().split())
    rows = [list(map(int, fh.readline().split())) for _ in range(n)]
    if any(len(r) != d for r in rows):
        raise InvalidArgument("graph file: wrong number of neighbours on a line")
    return LeftRegularGraph(n, m, d, np.array(rows, dtype=np.int64).reshape(n, d))
