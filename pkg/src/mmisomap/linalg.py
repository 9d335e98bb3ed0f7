"""Dense linear-algebra kernels.

Points are stored as rows throughout the package: a set of ``l`` points in
``R^d`` is an ``(l, d)`` array.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import RankDeficientError, RankDeficientWarning

JACOBI_MAX_N = 64


@dataclass(frozen=True)
class EigenPairs:
    """Top eigenpairs of a symmetric matrix.

    ``values`` is sorted in decreasing order and ``vectors[:, i]`` is the unit
    eigenvector belonging to ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def count(self):
        return len(self.values)


@dataclass(frozen=True)
class RigidTransform:
    """``y -> rotation @ y + translation`` with an orthonormal rotation."""

    rotation: np.ndarray
    translation: np.ndarray

    def apply(self, points):
        points = np.asarray(points, dtype=float)
        return points @ self.rotation.T + self.translation

    def orthonormality_error(self):
        d = self.rotation.shape[0]
        return float(np.max(np.abs(self.rotation.T @ self.rotation - np.eye(d))))


def fix_signs(vectors):
    """Flip columns so the largest-magnitude entry of each is nonnegative.

    Ties go to the lowest row index (``argmax`` returns the first maximum).
    """
    vectors = np.array(vectors, dtype=float, copy=True)
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[rows, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    return vectors * signs


def _check_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    asym = float(np.max(np.abs(M - M.T))) if M.size else 0.0
    if asym > 1e-10 * scale:
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    return M


def _off_norm(A):
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(M, tol=1e-12, max_sweeps=100):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` in the order the diagonal ends up in; callers
    sort.  Stops when the off-diagonal Frobenius norm falls below
    ``tol * ||M||_F``.
    """
    A = np.array(M, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0 or n == 1:
        return np.diag(A).copy(), V
    target = tol * norm
    for _ in range(max_sweeps):
        if _off_norm(A) < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        if _off_norm(A) >= target:
            raise np.linalg.LinAlgError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.diag(A).copy(), V


def symmetric_eig(M, top_d, method="auto"):
    """Largest ``top_d`` eigenpairs of a symmetric matrix.

    Parameters
    ----------
    M : (n, n) array
        Symmetric matrix.
    top_d : int
        Number of eigenpairs, ``1 <= top_d <= n``.
    method : {"auto", "jacobi", "lapack"}
        ``"auto"`` runs cyclic Jacobi for ``n <= 64`` and LAPACK otherwise.

    Returns
    -------
    EigenPairs
        Values in decreasing order, sign-fixed unit eigenvectors.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if not 1 <= top_d <= n:
        raise ValueError(f"top_d must lie in [1, {n}], got {top_d}")
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        values, vectors = jacobi_eigh(M)
        order = np.argsort(-values, kind="stable")[:top_d]
        values, vectors = values[order], vectors[:, order]
    elif method == "lapack":
        values, vectors = scipy.linalg.eigh(M, subset_by_index=[n - top_d, n - 1])
        values, vectors = values[::-1], vectors[:, ::-1]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return EigenPairs(values=np.ascontiguousarray(values),
                      vectors=fix_signs(vectors))


def qr_orthonormalize(A, lam=None):
    """QR factorisation with the diagonal of ``R`` forced nonnegative.

    A (numerically) singular ``A`` is retried once as ``A + lam*I`` with a
    :class:`RankDeficientWarning`; ``lam`` defaults to ``1e-8 * ||A||_F``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")

    def factor(B):
        Q, R = np.linalg.qr(B)
        signs = np.where(np.diag(R) < 0, -1.0, 1.0)
        Q = Q * signs
        R = signs[:, None] * R
        diag = np.abs(np.diag(R))
        ok = diag.size > 0 and diag.max() > 0 and diag.min() > 1e-12 * diag.max()
        return Q, R, ok

    Q, R, ok = factor(A)
    if ok:
        return Q, R
    if lam is None:
        lam = 1e-8 * float(np.linalg.norm(A))
    warnings.warn(f"rank-deficient matrix in QR; retrying with lambda={lam:.3e}",
                  RankDeficientWarning, stacklevel=2)
    Q, R, ok = factor(A + lam * np.eye(A.shape[0]))
    if not ok:
        raise RankDeficientError("matrix is singular even after regularisation")
    return Q, R


def solve_affine_lsq(source, target, lam=None):
    """Regularised least-squares affine map taking ``source`` onto ``target``.

    Solves ``[A beta] = T Z^T (Z Z^T + lam I)^{-1}`` with ``Z = [S; e^T]``,
    where ``S`` and ``T`` hold the points as columns.  ``source`` and
    ``target`` are ``(l, d)`` arrays with matching rows.  ``lam`` defaults to
    ``1e-8 * trace(Z Z^T)``.

    Returns
    -------
    A_raw : (d, d) array
    beta : (d,) array
    """
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if source.shape != target.shape or source.ndim != 2:
        raise ValueError(f"shape mismatch: {source.shape} vs {target.shape}")
    l, d = source.shape
    if l < 1:
        raise ValueError("need at least one point pair")
    Z = np.vstack([source.T, np.ones(l)])
    normal = Z @ Z.T
    if lam is None:
        lam = 1e-8 * float(np.trace(normal))
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    normal = normal + lam * np.eye(d + 1)
    if np.linalg.cond(normal) > 1.0 / np.finfo(float).eps:
        raise np.linalg.LinAlgError(
            "normal matrix is singular; increase the regulariser")
    coef = np.linalg.solve(normal, Z @ target).T
    if not np.all(np.isfinite(coef)):
        raise np.linalg.LinAlgError("non-finite least-squares solution")
    return coef[:, :d], coef[:, d]


def recompute_translation(A, source, target):
    """Translation minimising ``sum ||A y_i + beta - ry_i||^2`` for fixed ``A``."""
    source = np.asarray(source, dtype=float)
    target = np.asarray(target, dtype=float)
    if len(source) == 0:
        raise ValueError("need at least one point pair")
    return np.mean(target - source @ np.asarray(A).T, axis=0)


def pca_embed(X, d):
    """Project mean-centred points onto their top ``d`` principal directions."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected an (N, D) array")
    N, D = X.shape
    if N < 2:
        raise ValueError("PCA needs at least two points")
    if not 1 <= d <= min(N - 1, D):
        raise ValueError(f"d must lie in [1, {min(N - 1, D)}], got {d}")
    Xc = X - X.mean(axis=0)
    _, _, Vt = np.linalg.svd(Xc, full_matrices=False)
    directions = fix_signs(Vt[:d].T)
    return Xc @ directions


def affine_span_rank(P, tol=1e-6):
    """Dimension of the affine hull of a point set (relative SVD threshold)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if len(P) <= 1:
        return 0
    s = np.linalg.svd(P - P.mean(axis=0), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))
