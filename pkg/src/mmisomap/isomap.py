"""Classical Isomap and k-CC Isomap."""

import numpy as np

from .errors import DisconnectedGraphError
from .graph import (connect_components, eps_graph, geodesic_matrix, knn_graph,
                    label_components, pairwise_distances)
from .mds import classical_mds


def neighborhood_graph(X, k=None, eps=None, distances=None):
    """k-NN graph when ``k`` is given, otherwise the eps-NN graph."""
    if (k is None) == (eps is None):
        raise ValueError("give exactly one of k or eps")
    if distances is None:
        distances = pairwise_distances(X)
    if k is not None:
        return knn_graph(X, k, distances=distances)
    return eps_graph(X, eps, distances=distances)


def isomap_geodesics(X, k=None, eps=None):
    """Graph geodesic matrix of ``X``; raises if the graph is disconnected."""
    G = neighborhood_graph(X, k=k, eps=eps)
    components = label_components(G)
    if components.M > 1:
        raise DisconnectedGraphError(components.M)
    return geodesic_matrix(G)


def isomap(X, d, k=None, eps=None):
    """Classical Isomap of the points ``X`` (rows) into ``R^d``."""
    return classical_mds(isomap_geodesics(X, k=k, eps=eps), d)


def kcc_geodesics(X, k, connect_k=None):
    """Geodesics over the k-CC graph, plus the graph and its components."""
    D = pairwise_distances(X)
    G = knn_graph(X, k, distances=D)
    components = label_components(G)
    G = connect_components(G, components, k=connect_k, distances=D)
    return geodesic_matrix(G), G, components


def kcc_isomap(X, d, k, connect_k=None):
    """Isomap over the k-CC graph; never fails on disconnection."""
    D_geo, _, _ = kcc_geodesics(X, k, connect_k=connect_k)
    return classical_mds(D_geo, d)
