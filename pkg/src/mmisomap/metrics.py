"""Embedding quality measures."""

import numpy as np
from scipy.spatial.distance import pdist, squareform


def procrustes_align(A, B):
    """Rigidly move ``B`` onto ``A`` (rotation, reflection and translation).

    Returns the moved copy of ``B``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    if A.ndim != 2 or len(A) == 0:
        raise ValueError("expected non-empty (n, d) arrays")
    ca, cb = A.mean(axis=0), B.mean(axis=0)
    U, _, Vt = np.linalg.svd((B - cb).T @ (A - ca))
    return (B - cb) @ (U @ Vt) + ca


def procrustes_residual(A, B):
    """RMS pointwise distance between ``A`` and ``B`` after rigid alignment."""
    aligned = procrustes_align(A, B)
    if np.array_equal(A, B):
        return 0.0
    return float(np.sqrt(np.mean(np.sum((np.asarray(A, dtype=float) - aligned) ** 2, axis=1))))


def _pair_index(n, pairs):
    if pairs is None:
        return np.triu_indices(n, k=1)
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    return pairs[:, 0], pairs[:, 1]


def geodesic_preservation(Y, D_geo, pairs=None):
    """Max and mean relative error between embedded and reference distances.

    ``pairs`` is an optional ``(m, 2)`` index array; default is every pair.
    """
    Y = np.asarray(Y, dtype=float)
    D_geo = np.asarray(D_geo, dtype=float)
    if D_geo.shape != (len(Y), len(Y)):
        raise ValueError(f"distance matrix shape {D_geo.shape} does not match {len(Y)} points")
    i, j = _pair_index(len(Y), pairs)
    if len(i) == 0:
        return 0.0, 0.0
    ref = D_geo[i, j]
    if np.any(ref <= 0):
        raise ValueError("zero reference distance on an evaluated pair")
    emb = np.linalg.norm(Y[i] - Y[j], axis=1)
    rel = np.abs(emb - ref) / ref
    return float(rel.max()), float(rel.mean())


def residual_variance(D_geo, D_Y):
    """``1 - r**2`` between the upper triangles of two distance matrices."""
    D_geo = np.asarray(D_geo, dtype=float)
    D_Y = np.asarray(D_Y, dtype=float)
    if D_geo.shape != D_Y.shape or D_geo.ndim != 2 or D_geo.shape[0] != D_geo.shape[1]:
        raise ValueError("expected two square matrices of the same shape")
    iu = np.triu_indices(len(D_geo), k=1)
    a, b = D_geo[iu], D_Y[iu]
    if a.size < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ValueError("correlation undefined for constant distances")
    r = np.corrcoef(a, b)[0, 1]
    return float(min(1.0, max(0.0, 1.0 - r * r)))


def embedding_distances(Y):
    """Full Euclidean distance matrix of an embedding."""
    return squareform(pdist(np.asarray(Y, dtype=float)))
