"""Graph statistics: worked examples, structural identities, and exact
parity against a dense-adjacency oracle."""

import math

import numpy as np
import pytest

from threshnet import dist, graph
from threshnet.errors import CapacityError, DomainError
from threshnet.stats import make_stream


def _adjacency(w, theta):
    w = np.asarray(w, dtype=float)
    a = w[:, None] + w[None, :] > theta
    np.fill_diagonal(a, False)
    return a


def _oracle_degrees(w, theta):
    return _adjacency(w, theta).sum(axis=1)


def _oracle_triangles(w, theta):
    a = _adjacency(w, theta).astype(np.int64)
    return int(np.trace(a @ a @ a)) // 6


def _oracle_local_triangles(w, theta, i):
    a = _adjacency(w, theta)
    nb = np.nonzero(a[i])[0]
    return int(a[np.ix_(nb, nb)].sum()) // 2


def test_degree_example():
    g = graph.GraphSample.from_weights([0.2, 0.6, 0.9], 1.0)
    assert graph.all_degrees(g).tolist() == [1, 1, 2]


def test_degree_single_vertex():
    g = graph.GraphSample.from_weights([0.4], 1.0)
    assert graph.all_degrees(g).tolist() == [0]


def test_two_group_degrees():
    # light vertices isolated, heavy vertices pairwise complete
    w = [0.2] * 5 + [0.9] * 3
    g = graph.GraphSample.from_weights(w, 1.2)
    deg = graph.all_degrees(g)
    assert deg[:5].tolist() == [0] * 5
    assert deg[5:].tolist() == [2] * 3


def test_point_mass_complete_and_empty():
    s = make_stream(0)
    g = graph.sample_graph(dist.point_mass(0.7), 3, 1.0, s)
    assert graph.edge_list(g) == [(1, 2), (1, 3), (2, 3)]
    g = graph.sample_graph(dist.point_mass(0.4), 3, 1.0, make_stream(0))
    assert graph.edge_list(g) == []


def test_threshold_tie_is_no_edge():
    g = graph.GraphSample.from_weights([0.6, 0.6, 0.6], 1.2)
    assert graph.edge_list(g) == []
    assert graph.all_degrees(g).tolist() == [0, 0, 0]


def test_generate_determinism():
    a = graph.sample_graph(dist.uniform(0, 1), 50, 1.0, make_stream(9))
    b = graph.sample_graph(dist.uniform(0, 1), 50, 1.0, make_stream(9))
    assert np.array_equal(a.weights, b.weights)
    with pytest.raises(DomainError):
        graph.sample_graph(dist.uniform(0, 1), 0, 1.0, make_stream(9))


def test_sorted_view_invariants():
    g = graph.sample_graph(dist.uniform(0, 1), 100, 1.0, make_stream(1))
    assert sorted(g.order.tolist()) == list(range(100))
    assert np.all(np.diff(g.sorted_weights) >= 0)
    assert np.array_equal(g.weights[g.order], g.sorted_weights)


def test_edge_list_example():
    g = graph.GraphSample.from_weights([0.2, 0.6, 0.9], 1.0)
    assert graph.edge_list(g) == [(1, 3), (2, 3)]


def test_edge_list_cap_error_names_count():
    g = graph.GraphSample.from_weights([0.9] * 10, 1.0)  # 45 edges
    with pytest.raises(CapacityError, match="45"):
        graph.edge_list(g, cap=10)


def test_edge_csv_export(tmp_path):
    g = graph.GraphSample.from_weights([0.2, 0.6, 0.9], 1.0)
    path = tmp_path / "edges.csv"
    graph.write_edges_csv(g, path)
    assert path.read_bytes() == b"i,j\n1,3\n2,3\n"


def test_triangle_examples():
    assert graph.count_triangles(graph.GraphSample.from_weights([0.6, 0.6, 0.6], 1.0)) == 1
    g = graph.GraphSample.from_weights([0.2, 0.6, 0.9, 0.95], 1.0)
    assert graph.count_triangles(g) == 2
    assert graph.count_triangles(graph.GraphSample.from_weights([0.9, 0.9], 1.0)) == 0


def test_local_triangle_examples():
    g = graph.GraphSample.from_weights([0.9, 0.6, 0.9, 0.2], 1.0)
    assert graph.count_local_triangles(g, 1) == 2
    iso = graph.GraphSample.from_weights([0.1, 0.6, 0.9], 1.0)
    assert graph.count_local_triangles(iso, 1) == 0
    with pytest.raises(DomainError):
        graph.count_local_triangles(g, 5)


def test_local_global_identity():
    g = graph.GraphSample.from_weights([0.2, 0.6, 0.9, 0.95], 1.0)
    total = sum(graph.count_local_triangles(g, i) for i in range(1, 5))
    assert total == 3 * graph.count_triangles(g) == 6


def test_oracle_parity_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(2, 201))
        theta = float(rng.uniform(0.2, 1.8))
        kind = rng.integers(0, 3)
        if kind == 0:
            w = rng.random(n)
        elif kind == 1:
            w = rng.exponential(1.0, n)
        else:
            w = rng.choice([0.2, 0.5, 0.9], n)  # ties on purpose
        g = graph.GraphSample.from_weights(w, theta)
        assert graph.all_degrees(g).tolist() == _oracle_degrees(w, theta).tolist()
        assert graph.count_triangles(g) == _oracle_triangles(w, theta)
        i = int(rng.integers(0, n))
        assert graph.count_local_triangles(g, i + 1) == _oracle_local_triangles(w, theta, i)


def test_handshake_identity():
    rng = np.random.default_rng(17)
    for _ in range(20):
        n = int(rng.integers(2, 120))
        g = graph.GraphSample.from_weights(rng.random(n), float(rng.uniform(0.3, 1.7)))
        assert int(graph.all_degrees(g).sum()) == 2 * len(graph.edge_list(g))


def test_coupling_monotonicity():
    rng = np.random.default_rng(23)
    w = rng.random(80)
    thetas = sorted(rng.uniform(0.2, 1.8, 5))
    for lo, hi in zip(thetas, thetas[1:]):
        e_hi = set(graph.edge_list(graph.GraphSample.from_weights(w, hi)))
        e_lo = set(graph.edge_list(graph.GraphSample.from_weights(w, lo)))
        assert e_hi <= e_lo


def test_tagged_pair_degrees():
    d1, d2, edge = graph.tagged_pair_degrees(dist.point_mass(0.7), 5, 1.0, make_stream(0))
    assert (d1, d2, edge) == (5, 5, True)
    d1, d2, edge = graph.tagged_pair_degrees(dist.point_mass(0.4), 5, 1.0, make_stream(0))
    assert (d1, d2, edge) == (0, 0, False)
