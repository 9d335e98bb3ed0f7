import numpy as np
import pytest

from mmisomap.errors import NegativeEigenvalueWarning, NoPositiveEigenvalueError
from mmisomap.mds import classical_mds, tau
from mmisomap.metrics import procrustes_residual

from oracles import pairwise, tau_explicit
from properties import as_test, prop_mds_euclidean, prop_mds_scaling, prop_tau_centering

test_tau_centering = as_test(prop_tau_centering)
test_mds_euclidean = as_test(prop_mds_euclidean)
test_mds_scaling = as_test(prop_mds_scaling)


def test_tau_zero():
    assert np.array_equal(tau(np.zeros((4, 4))), np.zeros((4, 4)))


def test_tau_two_points():
    # S = [[0,4],[4,0]], H = I - 1/2 -> -H S H / 2 = [[1,-1],[-1,1]]
    assert np.allclose(tau(np.array([[0.0, 2.0], [2.0, 0.0]])), [[1, -1], [-1, 1]])


def test_tau_matches_explicit_centering():
    D = pairwise(np.random.default_rng(0).standard_normal((15, 3)))
    assert np.allclose(tau(D), tau_explicit(D), atol=1e-12)


def test_tau_rejects_infinite():
    D = np.array([[0.0, np.inf], [np.inf, 0.0]])
    with pytest.raises(ValueError):
        tau(D)


def test_mds_two_points():
    Y = classical_mds(np.array([[0.0, 2.0], [2.0, 0.0]]), 1)
    assert sorted(Y[:, 0].tolist()) == pytest.approx([-1.0, 1.0])


def test_mds_identical_points():
    with pytest.raises(NoPositiveEigenvalueError):
        classical_mds(np.zeros((3, 3)), 1)


def test_mds_recovers_configuration():
    X = np.random.default_rng(42).standard_normal((50, 3))
    assert procrustes_residual(X, classical_mds(pairwise(X), 3)) < 1e-8


def test_mds_clamps_negative_eigenvalues():
    # a 4-cycle graph metric is not Euclidean (diagonals 2 instead of sqrt 2)
    D = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], dtype=float)
    with pytest.warns(NegativeEigenvalueWarning):
        Y, values = classical_mds(D, 3, return_eigenvalues=True)
    assert np.all(Y[:, np.asarray(values) <= 0] == 0)


def test_mds_bad_dimension():
    with pytest.raises(ValueError):
        classical_mds(np.zeros((2, 2)) + [[0, 1], [1, 0]], 0)
