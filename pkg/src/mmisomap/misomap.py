"""M-Isomap: per-manifold Isomap composed through an embedded skeleton.

The data are split into manifolds by the k-CC graph, every manifold is
embedded on its own, and a small skeleton of points (inter-manifold edge
endpoints plus the furthest cross-manifold pairs) is embedded jointly.  Each
manifold embedding is then moved onto its part of the skeleton by a rigid
transform, so distances inside a manifold are kept exactly.
"""

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.csgraph

from .errors import DisconnectedGraphError, PaddedSkeletonWarning
from .graph import (connect_components, geodesic_matrix, knn_graph,
                    label_components, pairwise_distances)
from .linalg import (RigidTransform, qr_orthonormalize, recompute_translation,
                     solve_affine_lsq)
from .mds import classical_mds


@dataclass
class Manifold:
    """One data manifold: global member indices, geodesics and embedding."""

    members: np.ndarray
    k: int
    geodesics: np.ndarray
    embedding: np.ndarray

    @property
    def size(self):
        return len(self.members)


@dataclass
class Decomposition:
    manifolds: list
    components: object
    inter_edges: dict
    graph: object
    d: int

    @property
    def M(self):
        return len(self.manifolds)

    def local_edges(self, a, b):
        """Edges between manifolds ``a`` and ``b`` (1-based) as local indices.

        Each edge is ``(u, v, w)`` with ``u`` local to ``a`` and ``v`` local
        to ``b``, whichever of the two labels is smaller.
        """
        if a < b:
            edges = self.inter_edges.get((a, b), [])
        else:
            edges = [(v, u, w) for u, v, w in self.inter_edges.get((b, a), [])]
        pos_a = {g: i for i, g in enumerate(self.manifolds[a - 1].members)}
        pos_b = {g: i for i, g in enumerate(self.manifolds[b - 1].members)}
        return [(pos_a[u], pos_b[v], w) for u, v, w in edges]


@dataclass
class Skeleton:
    members: list
    global_members: np.ndarray
    offsets: np.ndarray
    distances: np.ndarray
    embedding: np.ndarray
    furthest: dict = field(default_factory=dict)

    def slice(self, m):
        """Rows of the skeleton embedding belonging to manifold ``m`` (1-based)."""
        return self.embedding[self.offsets[m - 1]:self.offsets[m]]


@dataclass
class MIsomapResult:
    embedding: np.ndarray
    components: object
    decomposition: Decomposition
    skeleton: Skeleton
    transforms: list
    timings: dict


def embed_manifold(D, d):
    """Classical MDS that tolerates manifolds with fewer than ``d + 1`` points."""
    n = D.shape[0]
    if n == 1:
        return np.zeros((1, d))
    Y = classical_mds(D, min(d, n))
    if Y.shape[1] < d:
        Y = np.hstack([Y, np.zeros((n, d - Y.shape[1]))])
    return Y


def learn_manifold(X, members, k, d):
    """Rebuild a k-NN graph on one manifold and run Isomap on it."""
    pts = X[members]
    n = len(members)
    if n == 1:
        return Manifold(members, 0, np.zeros((1, 1)), np.zeros((1, d)))
    k_eff = min(k, n - 1)
    G = knn_graph(pts, k_eff)
    comps = label_components(G)
    if comps.M > 1:
        raise DisconnectedGraphError(comps.M, where=f"manifold graph (k={k_eff})")
    D = geodesic_matrix(G)
    return Manifold(members, k_eff, D, embed_manifold(D, d))


def decompose(X, d, k, per_manifold_k=None, connect_k=None, connect=True,
              workers=1, timings=None):
    """k-CC clustering followed by per-manifold Isomap.

    With ``connect=False`` the components of the plain k-NN graph are used and
    no inter-manifold edges are recorded.
    """
    timings = {} if timings is None else timings
    X = np.asarray(X, dtype=float)
    t0 = time.perf_counter()
    D = pairwise_distances(X)
    G = knn_graph(X, k, distances=D)
    components = label_components(G)
    if connect:
        G = connect_components(G, components, k=k if connect_k is None else connect_k,
                               distances=D)
    timings["kcc_graph"] = time.perf_counter() - t0

    if per_manifold_k is None:
        ks = [k] * components.M
    else:
        ks = list(per_manifold_k)
        if len(ks) != components.M:
            raise ValueError(
                f"{len(ks)} per-manifold sizes given for {components.M} manifolds")

    t0 = time.perf_counter()
    jobs = list(zip(components.members, ks))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            manifolds = list(pool.map(lambda job: learn_manifold(X, job[0], job[1], d), jobs))
    else:
        manifolds = [learn_manifold(X, members, km, d) for members, km in jobs]
    timings["manifold_isomap"] = time.perf_counter() - t0
    return Decomposition(manifolds=manifolds, components=components,
                         inter_edges=G.inter_edges, graph=G, d=d)


def inter_manifold_distance(p, q, D_m, D_n, edges):
    """Shortest route from ``p`` (in manifold m) to ``q`` (in manifold n).

    ``edges`` holds ``(u, v, w)`` with ``u`` local to m and ``v`` local to n;
    the route walks inside m to ``u``, crosses the edge, and walks inside n.
    """
    if not edges:
        raise ValueError("no inter-manifold edges between the two manifolds")
    return min(D_m[p, u] + w + D_n[v, q] for u, v, w in edges)


def cross_distances(D_m, D_n, edges):
    """All :func:`inter_manifold_distance` values between two manifolds."""
    if not edges:
        raise ValueError("no inter-manifold edges between the two manifolds")
    out = np.full((D_m.shape[0], D_n.shape[0]), np.inf)
    for u, v, w in edges:
        np.minimum(out, (D_m[:, u] + w)[:, None] + D_n[v, :][None, :], out=out)
    return out


def furthest_pair(D_mn):
    """Index pair of the largest entry; ties go to the lowest (row, col)."""
    D_mn = np.asarray(D_mn)
    if D_mn.size == 0:
        raise ValueError("empty distance matrix")
    return tuple(int(i) for i in np.unravel_index(np.argmax(D_mn), D_mn.shape))


def _pad_members(chosen, D, target):
    """Add the points geodesically furthest from those already chosen."""
    chosen = list(chosen)
    n = D.shape[0]
    while len(chosen) < min(target, n):
        if chosen:
            score = np.min(D[chosen], axis=0)
        else:
            score = np.zeros(n)
        score[chosen] = -np.inf
        chosen.append(int(np.argmax(score)))
    return chosen


def build_skeleton(decomp):
    """Select skeleton points, assemble their distance matrix and embed it."""
    M, d = decomp.M, decomp.d
    cross = {}
    furthest = {}
    for a in range(1, M + 1):
        for b in range(a + 1, M + 1):
            edges = decomp.local_edges(a, b)
            if not edges:
                continue
            C = cross_distances(decomp.manifolds[a - 1].geodesics,
                                decomp.manifolds[b - 1].geodesics, edges)
            cross[(a, b)] = C
            furthest[(a, b)] = furthest_pair(C)

    members = []
    for m in range(1, M + 1):
        chosen = []
        for n in range(1, M + 1):
            if n == m:
                continue
            key = (min(m, n), max(m, n))
            if key not in cross:
                continue
            for u, _, _ in decomp.local_edges(m, n):
                chosen.append(u)
            fx = furthest[key]
            chosen.append(fx[0] if m < n else fx[1])
        chosen = list(dict.fromkeys(chosen))
        if len(chosen) < d + 1 and len(chosen) < decomp.manifolds[m - 1].size:
            before = len(chosen)
            chosen = _pad_members(chosen, decomp.manifolds[m - 1].geodesics, d + 1)
            warnings.warn(
                f"manifold {m}: skeleton padded from {before} to {len(chosen)} points",
                PaddedSkeletonWarning, stacklevel=2)
        members.append(np.array(chosen, dtype=int))

    offsets = np.concatenate([[0], np.cumsum([len(c) for c in members])])
    L = int(offsets[-1])
    D_I = np.zeros((L, L))
    for a in range(1, M + 1):
        ia = members[a - 1]
        sa = slice(offsets[a - 1], offsets[a])
        D_I[sa, sa] = decomp.manifolds[a - 1].geodesics[np.ix_(ia, ia)]
        for b in range(a + 1, M + 1):
            ib = members[b - 1]
            sb = slice(offsets[b - 1], offsets[b])
            if (a, b) in cross:
                block = cross[(a, b)][np.ix_(ia, ib)]
            else:
                block = np.full((len(ia), len(ib)), np.inf)
            D_I[sa, sb] = block
            D_I[sb, sa] = block.T
    if not np.all(np.isfinite(D_I)):
        # pairs left without an inter edge are reached through other manifolds
        D_I = scipy.sparse.csgraph.shortest_path(
            np.where(np.isfinite(D_I), D_I, 0.0), directed=False)
    global_members = np.concatenate(
        [decomp.manifolds[m].members[members[m]] for m in range(M)])
    return Skeleton(members=members, global_members=global_members, offsets=offsets,
                    distances=D_I, embedding=classical_mds(D_I, d), furthest=furthest)


def fit_rigid(source, target, lam=None):
    """Rigid transform taking ``source`` rows close to ``target`` rows.

    A regularised affine least-squares fit is orthonormalised by QR and the
    translation is then re-fitted for the orthonormal part.
    """
    A_raw, _ = solve_affine_lsq(source, target, lam=lam)
    Q, _ = qr_orthonormalize(A_raw)
    beta = recompute_translation(Q, source, target)
    return RigidTransform(rotation=Q, translation=beta)


def m_isomap(X, d, k=8, per_manifold_k=None, lam=None, workers=1):
    """Multi-manifold Isomap.

    Parameters
    ----------
    X : (N, D) array
        Input points.
    d : int
        Target dimension shared by all manifolds.
    k : int
        Neighborhood size of the k-CC graph; also the number of
        inter-manifold edges per manifold pair.
    per_manifold_k : sequence of int, optional
        Neighborhood size for rebuilding each manifold's graph (default ``k``).
    lam : float, optional
        Regulariser of the affine least-squares fit.
    workers : int
        Threads used for the independent per-manifold embeddings.

    Returns
    -------
    MIsomapResult
    """
    X = np.asarray(X, dtype=float)
    timings = {}
    decomp = decompose(X, d, k, per_manifold_k=per_manifold_k, workers=workers,
                       timings=timings)
    N = len(X)
    Y = np.zeros((N, d))
    if decomp.M == 1:
        only = decomp.manifolds[0]
        Y[only.members] = only.embedding
        return MIsomapResult(Y, decomp.components, decomp, None,
                             [RigidTransform(np.eye(d), np.zeros(d))], timings)

    t0 = time.perf_counter()
    skeleton = build_skeleton(decomp)
    timings["skeleton"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    transforms = []
    for m, manifold in enumerate(decomp.manifolds, start=1):
        source = manifold.embedding[skeleton.members[m - 1]]
        transform = fit_rigid(source, skeleton.slice(m), lam=lam)
        transforms.append(transform)
        Y[manifold.members] = transform.apply(manifold.embedding)
    timings["composition"] = time.perf_counter() - t0
    return MIsomapResult(Y, decomp.components, decomp, skeleton, transforms, timings)
