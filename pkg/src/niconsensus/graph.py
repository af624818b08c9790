"""Undirected graphs and the Laplacian / Kronecker algebra used by the consensus protocol.

Matrices throughout the package are plain ``numpy.ndarray`` objects with
row-major semantics; no wrapper type is introduced.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

#: Eigenvalues of symmetric matrices are trusted to this absolute accuracy
#: (all matrices here are well conditioned and at most 64 x 64).
EIG_TOL = 1e-10


@dataclass(frozen=True)
class Graph:
    """Unweighted undirected graph on nodes ``0 .. n-1``.

    Edges are stored as a frozenset of ``(i, j)`` pairs normalised to
    ``i < j``. Self-loops and out-of-range indices are rejected; duplicate
    edges collapse.
    """

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        norm = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={self.n}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @property
    def edge_list(self):
        """Edges as a sorted list of (i, j) with i < j."""
        return sorted(self.edges)

    def neighbors(self, i):
        return sorted(j for e in self.edges for a, j in (e, e[::-1]) if a == i)


def path_graph(n: int) -> Graph:
    """Chain 0-1-2-...-(n-1)."""
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    for i, j in g.edges:
        a[i, j] = a[j, i] = 1.0
    return a


def degree(g: Graph) -> np.ndarray:
    return np.diag(adjacency(g).sum(axis=1))


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian (degree matrix minus adjacency matrix).

    Symmetric, positive semi-definite, zero row sums.
    """
    a = adjacency(g)
    return np.diag(a.sum(axis=1)) - a


def is_connected(g: Graph) -> bool:
    """Breadth-first reachability of every node from node 0."""
    if g.n == 1:
        return True
    adj = {i: [] for i in range(g.n)}
    for i, j in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == g.n


def laplacian_eigenvalues(g: Graph) -> np.ndarray:
    """Ascending eigenvalues of the graph Laplacian."""
    return np.linalg.eigvalsh(laplacian(g))


def fiedler_value(g: Graph) -> float:
    """Second-smallest Laplacian eigenvalue (algebraic connectivity).

    Positive iff the graph is connected, for n >= 2.
    """
    if g.n < 2:
        raise ValueError("fiedler value needs at least two nodes")
    return float(laplacian_eigenvalues(g)[1])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two non-empty real matrices."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("kron requires non-empty matrices")
    return np.kron(a, b)
