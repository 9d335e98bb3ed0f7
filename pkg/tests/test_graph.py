import math
import warnings

import numpy as np
import pytest

from mmisomap.errors import DuplicatePointsError, InterEdgeShortfallWarning
from mmisomap.graph import (NeighborhoodGraph, connect_components, dijkstra, eps_graph,
                            geodesic_matrix, knn_graph, label_components, shortest_paths)

from oracles import components_bfs, floyd_warshall, knn_edges, random_connected_graph
from properties import (as_test, prop_connect_components, prop_knn_degree,
                        prop_knn_monotone, prop_shortest_paths_metric)

test_knn_degree = as_test(prop_knn_degree)
test_knn_monotone = as_test(prop_knn_monotone)
test_connect_components_properties = as_test(prop_connect_components)
test_shortest_paths_metric = as_test(prop_shortest_paths_metric)


def line(*xs):
    return np.array(xs, dtype=float)[:, None]


def edge_set(G):
    return {(i, j) for i, j, _ in G.edges()}


def graph_from(n, edges):
    G = NeighborhoodGraph.empty(n)
    for i, j, w in edges:
        G.add_edge(i, j, w)
    return G


def test_knn_three_points():
    G = knn_graph(line(0, 1, 3), 1)
    assert edge_set(G) == {(0, 1), (1, 2)}
    assert G.adjacency[1][2] == 2.0
    assert label_components(G).M == 1


def test_knn_two_pairs():
    G = knn_graph(line(0, 1, 10, 11), 1)
    assert edge_set(G) == {(0, 1), (2, 3)}
    assert label_components(G).M == 2


def test_knn_complete():
    X = np.random.default_rng(0).standard_normal((5, 2))
    assert G_is_complete(knn_graph(X, 4))


def G_is_complete(G):
    return G.n_edges() == G.n * (G.n - 1) // 2


def test_knn_matches_exhaustive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(10):
        X = rng.standard_normal((25, 3))
        k = int(rng.integers(1, 24))
        assert edge_set(knn_graph(X, k)) == knn_edges(X, k)


def test_knn_ties_prefer_lower_index():
    square = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], dtype=float)
    assert edge_set(knn_graph(square, 1)) == {(0, 1), (0, 2), (1, 3)}


def test_knn_errors():
    with pytest.raises(ValueError):
        knn_graph(line(0, 1, 2), 0)
    with pytest.raises(ValueError):
        knn_graph(line(0, 1, 2), 3)
    with pytest.raises(DuplicatePointsError):
        knn_graph(line(0, 1, 1), 1)


def test_eps_graph():
    X = line(0, 1, 3)
    assert edge_set(eps_graph(X, 1.5)) == {(0, 1)}
    assert edge_set(eps_graph(X, 10)) == {(0, 1), (0, 2), (1, 2)}
    assert edge_set(eps_graph(X, 2.0)) == {(0, 1)}
    with pytest.raises(ValueError):
        eps_graph(X, 0)


def test_graph_rejects_bad_edges():
    G = NeighborhoodGraph.empty(3)
    with pytest.raises(ValueError):
        G.add_edge(1, 1, 1.0)
    with pytest.raises(ValueError):
        G.add_edge(0, 1, 0.0)
    with pytest.raises(ValueError):
        G.add_edge(0, 1, math.inf)


def test_label_components_examples():
    assert label_components(graph_from(4, [(0, 1, 1), (2, 3, 1)])).M == 2
    assert label_components(graph_from(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])).M == 1
    comps = label_components(NeighborhoodGraph.empty(4))
    assert comps.M == 4
    assert comps.labels.tolist() == [1, 2, 3, 4]


def test_label_components_numbering_matches_union_find():
    rng = np.random.default_rng(12)
    for _ in range(20):
        n = int(rng.integers(1, 40))
        edges = set()
        for _ in range(int(rng.integers(0, n))):
            i, j = rng.choice(n, 2, replace=False) if n > 1 else (0, 0)
            if i != j:
                edges.add((int(min(i, j)), int(max(i, j))))
        comps = label_components(graph_from(n, [(i, j, 1.0) for i, j in edges]))
        assert comps.labels.tolist() == components_bfs(n, edges).tolist()
        for m, members in enumerate(comps.members, start=1):
            assert np.all(comps.labels[members] == m)


def test_connect_components_line():
    X = line(0, 1, 10, 11)
    G = knn_graph(X, 1)
    H = connect_components(G, label_components(G), k=2, X=X)
    # candidates by length: (1,10)=9, (0,10)=10, (1,11)=10, (0,11)=11
    assert H.inter_edges[(1, 2)] == [(1, 2, 9.0), (0, 3, 11.0)]
    assert not H.has_edge(0, 2)
    assert label_components(H).M == 1


def test_connect_components_single_component_unchanged():
    X = line(0, 1, 2)
    G = knn_graph(X, 1)
    H = connect_components(G, label_components(G), k=3, X=X)
    assert edge_set(H) == edge_set(G) and H.inter_edges == {}


def test_connect_components_three_singletons():
    X = np.array([[0.0, 0.0], [4.0, 0.0], [0.0, 3.0]])
    G = NeighborhoodGraph.empty(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", InterEdgeShortfallWarning)
        H = connect_components(G, label_components(G), k=3, X=X)
    assert [len(e) for e in H.inter_edges.values()] == [1, 1, 1]
    assert edge_set(H) == {(0, 1), (0, 2), (1, 2)}
    assert label_components(H).M == 1


def test_connect_components_shortfall_warns():
    X = line(0, 1, 10, 11)
    G = knn_graph(X, 1)
    with pytest.warns(InterEdgeShortfallWarning, match="only 2 of 5"):
        H = connect_components(G, label_components(G), k=5, X=X)
    assert len(H.inter_edges[(1, 2)]) == 2


def test_connect_components_default_k_is_mean_neighbor_count():
    X = line(0, 1, 2, 10, 11, 12)
    G = knn_graph(X, 2)
    H = connect_components(G, label_components(G), X=X)
    assert len(H.inter_edges[(1, 2)]) == 2


def test_shortest_paths_examples():
    path = graph_from(3, [(0, 1, 1.0), (1, 2, 1.0)])
    assert shortest_paths(path)[0, 2] == 2.0
    tri = graph_from(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])
    assert shortest_paths(tri, backend="heap")[0, 2] == 2.0
    assert dijkstra(tri, 2).tolist() == [2.0, 1.0, 0.0]


def test_shortest_paths_unreachable_and_sources():
    G = graph_from(4, [(0, 1, 2.0)])
    D = shortest_paths(G, sources=[1, 3])
    assert D.shape == (2, 4)
    assert D[0, 0] == 2.0 and math.isinf(D[0, 2]) and D[1, 3] == 0.0
    assert np.array_equal(D, shortest_paths(G, sources=[1, 3], backend="heap"))


@pytest.mark.parametrize("backend", ["heap", "scipy"])
def test_shortest_paths_match_floyd_warshall(backend):
    rng = np.random.default_rng(30)
    edges = random_connected_graph(rng, 30, 40)
    got = shortest_paths(graph_from(30, edges), backend=backend)
    assert np.max(np.abs(got - floyd_warshall(30, edges))) <= 1e-12


def test_geodesic_matrix_symmetric():
    rng = np.random.default_rng(31)
    D = geodesic_matrix(graph_from(20, random_connected_graph(rng, 20, 15)))
    assert np.array_equal(D, D.T)
