"""Neighborhood graphs, component labelling and graph geodesics."""

import heapq
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph
from scipy.spatial.distance import cdist

from .errors import DuplicatePointsError, InterEdgeShortfallWarning


@dataclass
class NeighborhoodGraph:
    """Weighted undirected graph over point indices ``0..n-1``.

    ``adjacency[i]`` maps each neighbor of ``i`` to the Euclidean edge length.
    ``inter_edges[(a, b)]`` (component labels ``a < b``) lists the added
    inter-manifold edges as ``(u, v, w)`` with ``u`` in component ``a``.
    ``neighbor_counts[i]`` is how many neighbors ``i`` selected itself, before
    symmetrisation.
    """

    n: int
    adjacency: list
    neighbor_counts: np.ndarray
    inter_edges: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, n):
        return cls(n=n, adjacency=[{} for _ in range(n)],
                   neighbor_counts=np.zeros(n, dtype=int))

    def add_edge(self, i, j, w):
        if i == j:
            raise ValueError("self-loops are not allowed")
        if not (w > 0 and np.isfinite(w)):
            raise ValueError(f"edge weight must be positive and finite, got {w}")
        self.adjacency[i][j] = w
        self.adjacency[j][i] = w

    def has_edge(self, i, j):
        return j in self.adjacency[i]

    def neighbors(self, i):
        return sorted(self.adjacency[i])

    def degree(self):
        return np.array([len(a) for a in self.adjacency])

    def edges(self):
        """Yield each undirected edge once as ``(i, j, w)`` with ``i < j``."""
        for i, nbrs in enumerate(self.adjacency):
            for j in sorted(nbrs):
                if i < j:
                    yield i, j, nbrs[j]

    def n_edges(self):
        return sum(len(a) for a in self.adjacency) // 2

    def copy(self):
        return NeighborhoodGraph(
            n=self.n,
            adjacency=[dict(a) for a in self.adjacency],
            neighbor_counts=self.neighbor_counts.copy(),
            inter_edges={key: list(v) for key, v in self.inter_edges.items()})

    def subgraph(self, members):
        """Induced subgraph on ``members``, relabelled ``0..len(members)-1``."""
        local = {g: i for i, g in enumerate(members)}
        sub = NeighborhoodGraph.empty(len(members))
        for g, i in local.items():
            for h, w in self.adjacency[g].items():
                if h in local:
                    sub.adjacency[i][local[h]] = w
        sub.neighbor_counts = np.array([len(a) for a in sub.adjacency])
        return sub

    def to_csr(self):
        rows, cols, vals = [], [], []
        for i, nbrs in enumerate(self.adjacency):
            for j, w in nbrs.items():
                rows.append(i)
                cols.append(j)
                vals.append(w)
        return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))


@dataclass(frozen=True)
class ComponentLabels:
    """Connected components; ``labels[i]`` is in ``1..M``."""

    labels: np.ndarray
    members: tuple

    @property
    def M(self):
        return len(self.members)

    def sizes(self):
        return [len(m) for m in self.members]


def pairwise_distances(X):
    """Euclidean distance matrix; raises on duplicate points."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected an (N, D) point array")
    D = cdist(X, X)
    if len(X) > 1:
        off = D + np.diag(np.full(len(X), np.inf))
        if np.min(off) == 0.0:
            i, j = np.unravel_index(np.argmin(off), off.shape)
            raise DuplicatePointsError(f"points {i} and {j} coincide")
    return D


def knn_graph(X, k, distances=None):
    """Symmetrised k-nearest-neighbor graph.

    ``i`` and ``j`` are joined when either lists the other among its ``k``
    nearest points; ties go to the lower index.
    """
    D = pairwise_distances(X) if distances is None else distances
    n = D.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    G = NeighborhoodGraph.empty(n)
    masked = D + np.diag(np.full(n, np.inf))
    order = np.argsort(masked, axis=1, kind="stable")[:, :k]
    for i in range(n):
        for j in order[i]:
            G.add_edge(i, int(j), float(D[i, j]))
    G.neighbor_counts = np.full(n, k)
    return G


def eps_graph(X, eps, distances=None):
    """Graph joining every pair closer than ``eps`` (strict inequality)."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    D = pairwise_distances(X) if distances is None else distances
    n = D.shape[0]
    G = NeighborhoodGraph.empty(n)
    ii, jj = np.nonzero(np.triu(D < eps, k=1))
    for i, j in zip(ii, jj):
        G.add_edge(int(i), int(j), float(D[i, j]))
    G.neighbor_counts = G.degree()
    return G


def label_components(G):
    """Breadth-first component labelling.

    Searches start from the lowest unlabelled vertex, so components are
    numbered by their smallest member.
    """
    labels = np.zeros(G.n, dtype=int)
    members = []
    current = 0
    for start in range(G.n):
        if labels[start]:
            continue
        current += 1
        labels[start] = current
        queue = deque([start])
        found = [start]
        while queue:
            x = queue.popleft()
            for y in G.neighbors(x):
                if not labels[y]:
                    labels[y] = current
                    queue.append(y)
                    found.append(y)
        members.append(np.array(sorted(found), dtype=int))
    return ComponentLabels(labels=labels, members=tuple(members))


def connect_components(G, components, k=None, X=None, distances=None):
    """Join every pair of components by up to ``k`` short vertex-disjoint edges.

    Candidate edges of a pair are scanned by increasing length (ties by
    endpoint indices); an edge is skipped when either endpoint already carries
    an inter-manifold edge, for any pair.  A pair left with no disjoint edge
    at all still receives its single shortest edge, so the result is always
    connected.  ``k`` defaults to the rounded mean
    of ``G.neighbor_counts``.  Needs either the points ``X`` or their distance
    matrix.
    """
    out = G.copy()
    if components.M < 2:
        return out
    if k is None:
        k = max(1, int(round(float(np.mean(G.neighbor_counts)))))
    if k < 1:
        raise ValueError("k must be at least 1")
    if distances is None:
        if X is None:
            raise ValueError("connect_components needs X or distances")
        distances = pairwise_distances(X)
    used = np.zeros(G.n, dtype=bool)
    for a in range(1, components.M + 1):
        for b in range(a + 1, components.M + 1):
            A = components.members[a - 1]
            B = components.members[b - 1]
            block = distances[np.ix_(A, B)]
            order = np.argsort(block, axis=None, kind="stable")
            chosen = []
            for flat in order:
                r, c = divmod(int(flat), len(B))
                u, v = int(A[r]), int(B[c])
                if used[u] or used[v]:
                    continue
                w = float(block[r, c])
                chosen.append((u, v, w))
                used[u] = used[v] = True
                out.add_edge(u, v, w)
                if len(chosen) == k:
                    break
            if not chosen:
                r, c = divmod(int(order[0]), len(B))
                u, v, w = int(A[r]), int(B[c]), float(block[r, c])
                chosen.append((u, v, w))
                used[u] = used[v] = True
                out.add_edge(u, v, w)
                warnings.warn(
                    f"components {a} and {b}: no vertex-disjoint edge left; "
                    "reusing an endpoint to keep the graph connected",
                    InterEdgeShortfallWarning, stacklevel=2)
            elif len(chosen) < k:
                warnings.warn(
                    f"components {a} and {b}: only {len(chosen)} of {k} "
                    "vertex-disjoint inter-manifold edges available",
                    InterEdgeShortfallWarning, stacklevel=2)
            out.inter_edges[(a, b)] = chosen
    return out


def dijkstra(G, source):
    """Single-source shortest paths with a binary heap; ``inf`` if unreachable."""
    dist = np.full(G.n, np.inf)
    dist[source] = 0.0
    done = np.zeros(G.n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in G.adjacency[u].items():
            alt = du + w
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))
    return dist


def shortest_paths(G, sources=None, backend="scipy"):
    """Shortest-path lengths from each of ``sources`` (default: all vertices).

    Returns a ``(len(sources), n)`` array; unreachable pairs are ``inf``.
    ``backend="heap"`` runs the pure-Python heap Dijkstra, ``"scipy"`` the
    compiled one from :mod:`scipy.sparse.csgraph`.
    """
    if sources is None:
        sources = np.arange(G.n)
    sources = np.atleast_1d(np.asarray(sources, dtype=int))
    if backend == "heap":
        return np.array([dijkstra(G, int(s)) for s in sources]).reshape(len(sources), G.n)
    if backend == "scipy":
        if G.n == 0:
            return np.zeros((len(sources), 0))
        return scipy.sparse.csgraph.dijkstra(G.to_csr(), directed=False, indices=sources)
    raise ValueError(f"unknown backend {backend!r}")


def geodesic_matrix(G, backend="scipy"):
    """All-pairs graph distances, symmetrised to remove round-off asymmetry."""
    D = shortest_paths(G, backend=backend)
    return np.minimum(D, D.T)
