"""Decomposition-composition (D-C) Isomap, original and revised.

Clusters are embedded separately and then placed around the embedding of
their centers.  The revised variant chooses centers from the inter-cluster
points and adds single-point fictitious clusters until the centers can anchor
a ``d``-dimensional simplex.
"""

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path
from scipy.spatial.distance import cdist

from .errors import (CenterFallbackWarning, FictitiousClusterError,
                     FictitiousClusterWarning, InsufficientClustersError,
                     RankDeficientError, TriangulationError)
from .linalg import RigidTransform, affine_span_rank, symmetric_eig
from .mds import classical_mds
from .misomap import decompose

DEFAULT_GAMMAS = (1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 3.0, -3.0, 1 / 3, -1 / 3)
DEFAULT_BETA = 2.0
MAX_FICTITIOUS = 8


@dataclass(frozen=True)
class FictitiousCluster:
    position: np.ndarray
    gamma: float
    accepted: bool
    pair: tuple
    ratio: float


@dataclass
class DCIsomapResult:
    embedding: np.ndarray
    components: object
    decomposition: object
    centers: list
    center_positions: np.ndarray
    center_distances: np.ndarray
    center_embedding: np.ndarray
    fictitious: list
    transforms: list
    timings: dict


def minimax_center(D_m):
    """Point with the smallest eccentricity (lowest index on ties)."""
    D_m = np.asarray(D_m, dtype=float)
    return int(np.argmin(np.max(D_m, axis=1)))


def center_distances(d_center, d0):
    """Distances between cluster centers routed through the nearest couples.

    ``d_center[m, n]`` is the geodesic from the center of cluster m to its
    point nearest to cluster n; ``d0[m, n]`` is the length of that nearest
    couple.  Entry ``(m, n)`` of the result is
    ``d_center[m, n] + d0[m, n] + d_center[n, m]``.
    """
    d_center = np.asarray(d_center, dtype=float)
    d0 = np.asarray(d0, dtype=float)
    # summed in an order that keeps the result exactly symmetric
    out = (d_center + d_center.T) + 0.5 * (d0 + d0.T)
    np.fill_diagonal(out, 0.0)
    return out


def interpolate_reference(cy_m, cy_mi, d_m_mi, d0, d_mi_m):
    """Point on the segment from ``cy_m`` to ``cy_mi`` at the center-to-edge fraction."""
    total = d_m_mi + d0 + d_mi_m
    if not total > 0:
        raise ValueError("total center distance must be positive")
    cy_m = np.asarray(cy_m, dtype=float)
    return cy_m + (d_m_mi / total) * (np.asarray(cy_mi, dtype=float) - cy_m)


def _principal_frame(V):
    """Eigenvectors of ``V^T V`` with data-driven signs.

    Each axis is oriented so the summed projection of the rows is positive
    (falling back to the first row with a clear projection).  The frame then
    rotates together with the data.
    """
    d = V.shape[1]
    pairs = symmetric_eig(V.T @ V, d)
    Q = pairs.vectors.copy()
    proj = V @ Q
    scale = max(1.0, float(np.max(np.abs(V))))
    for j in range(d):
        total = proj[:, j].sum()
        if abs(total) <= 1e-9 * scale:
            clear = np.nonzero(np.abs(proj[:, j]) > 1e-9 * scale)[0]
            total = proj[clear[0], j] if len(clear) else 1.0
        if total < 0:
            Q[:, j] = -Q[:, j]
    return Q


def rotation_from_pca(NY, SY, tol=1e-9):
    """Rotation ``QS @ QN.T`` aligning the principal frames of two vector sets.

    ``NY`` and ``SY`` are ``(d, d)`` arrays whose rows are vectors measured
    from the respective cluster center.
    """
    NY = np.asarray(NY, dtype=float)
    SY = np.asarray(SY, dtype=float)
    if NY.shape != SY.shape or NY.ndim != 2:
        raise ValueError(f"shape mismatch: {NY.shape} vs {SY.shape}")
    d = NY.shape[1]
    for name, V in (("reference", NY), ("target", SY)):
        s = np.linalg.svd(V, compute_uv=False)
        if len(s) < d or s[0] == 0 or s[-1] <= tol * s[0]:
            raise RankDeficientError(
                f"{name} set spans fewer than {d} dimensions; add a fictitious cluster")
    return _principal_frame(SY) @ _principal_frame(NY).T


def _angle(a, b):
    cos = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.acos(min(1.0, max(-1.0, float(cos))))


def suggested_distances(inner_pts, outer_pts, min_sine=1e-8):
    """Center-to-inter-point distances suggested by the triangle construction.

    ``inner_pts[i]`` is the cluster's point nearest to another cluster and
    ``outer_pts[i]`` its partner there.  The center is assumed to lie on the
    extension of each partner-to-inner segment; two such lines and the segment
    between the partners form a triangle solved by the Law of Sines.  Returns
    a dict ``{i: distance}``; pairs failing the angle condition are skipped.
    """
    inner_pts = np.asarray(inner_pts, dtype=float)
    outer_pts = np.asarray(outer_pts, dtype=float)
    out = {}
    n = len(inner_pts)
    for i in range(n):
        for j in range(i + 1, n):
            if i in out and j in out:
                continue
            qi, qj = outer_pts[i], outer_pts[j]
            c = float(np.linalg.norm(qi - qj))
            ri = inner_pts[i] - qi
            rj = inner_pts[j] - qj
            if c == 0 or not np.any(ri) or not np.any(rj):
                continue
            alpha = _angle(ri, qj - qi)
            beta = _angle(rj, qi - qj)
            s = math.sin(alpha + beta)
            if alpha + beta >= math.pi or s < min_sine:
                continue
            di = c * math.sin(beta) / s - float(np.linalg.norm(ri))
            dj = c * math.sin(alpha) / s - float(np.linalg.norm(rj))
            if di >= 0 and i not in out:
                out[i] = di
            if dj >= 0 and j not in out:
                out[j] = dj
    return out


def center_by_triangulation(D_m, inner, inner_pts, outer_pts, needed):
    """Cluster point whose geodesics best match the suggested distances.

    ``inner`` holds local indices of the inter-cluster points, aligned with
    ``inner_pts``/``outer_pts``.  Raises :class:`TriangulationError` when
    fewer than ``needed`` suggested distances are available.
    """
    D_m = np.asarray(D_m, dtype=float)
    suggested = suggested_distances(inner_pts, outer_pts)
    if len(suggested) < needed:
        raise TriangulationError(
            f"only {len(suggested)} suggested distances, {needed} needed")
    keys = sorted(suggested)
    cols = [inner[i] for i in keys]
    target = np.array([suggested[i] for i in keys])
    f = np.sum(np.abs(D_m[:, cols] - target), axis=1)
    return int(np.argmin(f))


def center_by_spread(D_m, inner):
    """Point maximising the summed pairwise minimum distance to the inter points."""
    D_m = np.asarray(D_m, dtype=float)
    inner = list(inner)
    if D_m.shape[0] == 1:
        return 0
    if len(inner) == 1:
        return int(np.argmax(D_m[:, inner[0]]))
    g = np.zeros(D_m.shape[0])
    for a in range(len(inner)):
        for b in range(a + 1, len(inner)):
            da, db = D_m[:, inner[a]], D_m[:, inner[b]]
            g += da + db - np.abs(da - db)
    return int(np.argmax(g))


def nearest_couples(A, B, count):
    """Up to ``count`` shortest vertex-disjoint couples between two point sets."""
    block = cdist(np.atleast_2d(A), np.atleast_2d(B))
    used_a, used_b = set(), set()
    out = []
    for flat in np.argsort(block, axis=None, kind="stable"):
        i, j = divmod(int(flat), block.shape[1])
        if i in used_a or j in used_b:
            continue
        out.append((i, j, float(block[i, j])))
        used_a.add(i)
        used_b.add(j)
        if len(out) == count:
            break
    return out


def _cluster_gaps(clusters):
    M = len(clusters)
    gaps = np.zeros((M, M))
    for a in range(M):
        for b in range(a + 1, M):
            gaps[a, b] = gaps[b, a] = cdist(clusters[a], clusters[b]).min()
    return gaps


def add_fictitious_cluster(clusters, beta=DEFAULT_BETA, gamma_schedule=DEFAULT_GAMMAS,
                           n_real=None):
    """Place one synthetic single-point cluster by trial and error over ``gamma``.

    The generating pair is the cluster pair with the largest nearest-cluster
    gap among the first ``n_real`` clusters.  With ``m1``, ``m2`` the
    midpoints of its first and second nearest couples, candidates are
    ``m1 + gamma * |first couple| * (m2 - m1) / |m2 - m1|``; the first whose
    distances to its two nearest clusters have a ratio strictly inside
    ``(1/beta, beta)`` is returned.
    """
    clusters = [np.atleast_2d(np.asarray(c, dtype=float)) for c in clusters]
    n_real = len(clusters) if n_real is None else n_real
    if n_real < 2:
        raise FictitiousClusterError("need at least two clusters")
    if not beta > 1:
        raise ValueError("beta must exceed 1")
    gaps = _cluster_gaps(clusters)
    real = gaps[:n_real, :n_real] + np.diag(np.full(n_real, np.inf))
    nearest = np.argmin(real, axis=1)
    p = int(np.argmax(real[np.arange(n_real), nearest]))
    q = int(nearest[p])
    couples = nearest_couples(clusters[p], clusters[q], 2)
    if len(couples) < 2:
        raise FictitiousClusterError(
            f"clusters {p + 1} and {q + 1} lack a second nearest couple")
    (i1, j1, w1), (i2, j2, _) = couples
    m1 = 0.5 * (clusters[p][i1] + clusters[q][j1])
    m2 = 0.5 * (clusters[p][i2] + clusters[q][j2])
    step = m2 - m1
    length = float(np.linalg.norm(step))
    if length <= 1e-12 * max(1.0, float(np.linalg.norm(m1))):
        raise FictitiousClusterError("midpoints of the two nearest couples coincide")
    direction = step / length
    for gamma in gamma_schedule:
        x = m1 + gamma * w1 * direction
        dist = np.array([np.min(np.linalg.norm(c - x, axis=1)) for c in clusters])
        first, second = np.argsort(dist, kind="stable")[:2]
        if dist[second] == 0:
            continue
        ratio = float(dist[first] / dist[second])
        if 1.0 / beta < ratio < beta:
            return FictitiousCluster(position=x, gamma=float(gamma), accepted=True,
                                     pair=(p, q), ratio=ratio)
    raise FictitiousClusterError(f"no gamma in {list(gamma_schedule)} satisfies beta={beta}")


def _couples(clusters):
    """Nearest couple ``(i, j, d0)`` for every ordered cluster pair."""
    M = len(clusters)
    near = {}
    for a in range(M):
        for b in range(a + 1, M):
            block = cdist(clusters[a], clusters[b])
            i, j = np.unravel_index(np.argmin(block), block.shape)
            near[(a, b)] = (int(i), int(j), float(block[i, j]))
            near[(b, a)] = (int(j), int(i), float(block[i, j]))
    return near


def dc_isomap(X, d, k, revised=False, per_cluster_k=None, beta=DEFAULT_BETA,
              gamma_schedule=DEFAULT_GAMMAS, workers=1):
    """D-C Isomap.

    Parameters
    ----------
    X : (N, D) array
    d : int
        Target dimension.
    k : int
        k-NN neighborhood size used to find the clusters.
    revised : bool
        Use the revised center selection and fictitious clusters.
    per_cluster_k : sequence of int, optional
        Neighborhood size for each cluster's own graph (default ``k``).
    beta, gamma_schedule
        Acceptance bound and trial order for fictitious clusters.

    Returns
    -------
    DCIsomapResult
    """
    X = np.asarray(X, dtype=float)
    timings = {}
    decomp = decompose(X, d, k, per_manifold_k=per_cluster_k, connect=False,
                       workers=workers, timings=timings)
    M = decomp.M
    Y = np.zeros((len(X), d))
    if M == 1:
        only = decomp.manifolds[0]
        Y[only.members] = only.embedding
        return DCIsomapResult(Y, decomp.components, decomp, [minimax_center(only.geodesics)],
                              None, None, None, [], [RigidTransform(np.eye(d), np.zeros(d))],
                              timings)
    if not revised and M < d + 1:
        raise InsufficientClustersError(
            f"insufficient clusters: {M} found but at least d+1={d + 1} are needed "
            "for rotation references (use the revised method)")

    t0 = time.perf_counter()
    real = [X[m.members] for m in decomp.manifolds]
    fictitious = []

    def add_one():
        fc = add_fictitious_cluster(real + [f.position[None, :] for f in fictitious],
                                    beta=beta, gamma_schedule=gamma_schedule, n_real=M)
        fictitious.append(fc)
        warnings.warn(
            f"fictitious cluster added at {np.round(fc.position, 6).tolist()} "
            f"with gamma={fc.gamma:g}", FictitiousClusterWarning, stacklevel=3)

    if revised:
        while M + len(fictitious) < d + 1:
            add_one()

    spread_only = set()
    while True:
        clusters = real + [f.position[None, :] for f in fictitious]
        total = len(clusters)
        near = _couples(clusters)
        centers = []
        for m in range(total):
            if m >= M:
                centers.append(0)
                continue
            D_m = decomp.manifolds[m].geodesics
            others = [n for n in range(total) if n != m]
            inner = [near[(m, n)][0] for n in others]
            if not revised:
                centers.append(minimax_center(D_m))
                continue
            if m in spread_only:
                centers.append(center_by_spread(D_m, inner))
                continue
            partners = np.array([clusters[n][near[(m, n)][1]] for n in others])
            try:
                centers.append(center_by_triangulation(
                    D_m, inner, real[m][inner], partners, needed=d))
            except TriangulationError as exc:
                warnings.warn(f"cluster {m + 1}: {exc}; using the spread criterion",
                              CenterFallbackWarning, stacklevel=2)
                centers.append(center_by_spread(D_m, inner))
        positions = np.array([clusters[m][centers[m]] for m in range(total)])
        if revised and affine_span_rank(positions) < d:
            if len(fictitious) >= MAX_FICTITIOUS:
                raise InsufficientClustersError("centers stay degenerate after adding clusters")
            add_one()
            continue

        d_center = np.zeros((total, total))
        d0 = np.zeros((total, total))
        for (a, b), (i, _, w) in near.items():
            d0[a, b] = w
            if a < M:
                d_center[a, b] = decomp.manifolds[a].geodesics[centers[a], i]
        D_tilde = center_distances(d_center, d0)
        CY = classical_mds(shortest_path(D_tilde, directed=False), d)

        try:
            transforms = []
            for m in range(M):
                manifold = decomp.manifolds[m]
                order = np.argsort(D_tilde[m] + np.where(np.arange(total) == m, np.inf, 0.0),
                                   kind="stable")[:d]
                y_c = manifold.embedding[centers[m]]
                NY = np.array([manifold.embedding[near[(m, n)][0]] - y_c for n in order])
                SY = np.array([
                    interpolate_reference(CY[m], CY[n], d_center[m, n], d0[m, n],
                                          d_center[n, m]) - CY[m]
                    for n in order])
                try:
                    A = rotation_from_pca(NY, SY)
                except RankDeficientError:
                    failed = m
                    raise
                transforms.append(RigidTransform(rotation=A, translation=CY[m] - A @ y_c))
        except RankDeficientError as exc:
            if not revised:
                raise
            if failed not in spread_only:
                # a center sitting on one of its inter points gives a zero reference
                spread_only.add(failed)
                warnings.warn(f"cluster {failed + 1}: {exc}; using the spread criterion",
                              CenterFallbackWarning, stacklevel=2)
                continue
            if len(fictitious) >= MAX_FICTITIOUS:
                raise
            add_one()
            continue
        break

    for manifold, transform in zip(decomp.manifolds, transforms):
        Y[manifold.members] = transform.apply(manifold.embedding)
    timings["composition"] = time.perf_counter() - t0
    global_centers = [int(decomp.manifolds[m].members[centers[m]]) for m in range(M)]
    return DCIsomapResult(Y, decomp.components, decomp, global_centers, positions,
                          D_tilde, CY, fictitious, transforms, timings)
