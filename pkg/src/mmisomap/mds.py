"""Classical multidimensional scaling."""

import warnings

import numpy as np

from .errors import NegativeEigenvalueWarning, NoPositiveEigenvalueError
from .linalg import symmetric_eig


def tau(D):
    """Double-centred squared distances, ``-H S H / 2`` with ``S = D**2``."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square distance matrix, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError("distance matrix has unreached (infinite) entries")
    S = D * D
    B = S - S.mean(axis=0, keepdims=True)
    B = B - B.mean(axis=1, keepdims=True)
    B = -0.5 * B
    return 0.5 * (B + B.T)


def classical_mds(D, d, return_eigenvalues=False):
    """Embed a distance matrix in ``R^d`` from the top eigenpairs of ``tau(D)``.

    Row ``i`` of the result is ``(sqrt(l_1) v_1[i], ..., sqrt(l_d) v_d[i])``.
    Negative eigenvalues among the top ``d`` are clamped to zero with a
    :class:`NegativeEigenvalueWarning`.
    """
    if d < 1:
        raise ValueError(f"target dimension must be positive, got {d}")
    B = tau(D)
    n = B.shape[0]
    if d > n:
        raise ValueError(f"cannot embed {n} points in {d} dimensions")
    pairs = symmetric_eig(B, d)
    values = pairs.values
    floor = 1e-12 * float(np.linalg.norm(B))
    if not np.any(values > floor):
        raise NoPositiveEigenvalueError(
            "no positive eigenvalue: the configuration is degenerate")
    if np.any(values < 0):
        warnings.warn(
            f"{int(np.sum(values < 0))} negative eigenvalue(s) clamped to zero "
            f"(most negative {values.min():.3e})",
            NegativeEigenvalueWarning, stacklevel=2)
    Y = pairs.vectors * np.sqrt(np.clip(values, 0.0, None))
    if return_eigenvalues:
        return Y, values
    return Y
