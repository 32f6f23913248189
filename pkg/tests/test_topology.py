import numpy as np
import pytest

from dataset import Multigraph
from graph import (SparseMatrix, VoteConfig, extract_edge_topology, extract_subgraph_topology, first_nn,
                   topology_stats, triangle_similarity, vote_filter)

from conftest import complete_graph, path_graph, random_adjacency, random_multigraph


def dense_vote(views, threshold):
    count = sum((v > 0).astype(int) for v in views)
    out = (count >= threshold).astype(float)
    np.fill_diagonal(out, 0)
    return out


def dense_triangle(a):
    a = a.copy()
    np.fill_diagonal(a, 0)
    looped = a + np.eye(len(a))
    return (looped @ looped) * looped


def dense_first_nn(ahat):
    n = len(ahat)
    out = np.zeros((n, n))
    for i in range(n):
        best, best_j = 0.0, None
        for j in range(n):
            if j != i and ahat[i, j] > best:
                best, best_j = ahat[i, j], j
        if best_j is not None:
            out[i, best_j] = out[best_j, i] = 1
    return out


def multigraph_of(dense_views):
    n = len(dense_views[0])
    return Multigraph([SparseMatrix.from_dense(v) for v in dense_views], np.ones((n, 1)), np.zeros(n, dtype=int))


def test_vote_threshold_two():
    n = 3
    views = [np.zeros((n, n)) for _ in range(3)]
    for v in (views[1], views[2]):
        v[0, 1] = v[1, 0] = 1
    views[0][1, 2] = views[0][2, 1] = 1
    e = vote_filter([SparseMatrix.from_dense(v) for v in views]).to_dense()
    assert e[0, 1] == 1 and e[1, 0] == 1
    assert e[1, 2] == 0


def test_vote_empty_views():
    out = vote_filter([SparseMatrix.zeros(4)] * 3)
    assert out.nnz == 0


def test_vote_ignores_diagonal():
    views = [SparseMatrix.identity(3)] * 2
    assert vote_filter(views).nnz == 0
    assert vote_filter(views, ignore_diagonal=False) == SparseMatrix.identity(3)


def test_vote_errors():
    with pytest.raises(ValueError):
        vote_filter([SparseMatrix.zeros(3), SparseMatrix.zeros(4)])
    with pytest.raises(ValueError):
        vote_filter([SparseMatrix.zeros(3)] * 2, VoteConfig(3))
    with pytest.raises(ValueError):
        vote_filter([SparseMatrix.zeros(3)])


def test_vote_compares_positivity_not_weight():
    a = SparseMatrix.from_dense([[0, 0.2], [0.2, 0]])
    b = SparseMatrix.from_dense([[0, 7.0], [7.0, 0]])
    np.testing.assert_array_equal(vote_filter([a, b]).to_dense(), [[0, 1], [1, 0]])


def test_triangle_similarity_examples():
    np.testing.assert_array_equal(triangle_similarity(SparseMatrix.from_dense(complete_graph())).to_dense(),
                                  3 * np.ones((3, 3)))
    np.testing.assert_array_equal(triangle_similarity(SparseMatrix.from_dense(path_graph())).to_dense(),
                                  [[2, 2, 0], [2, 3, 2], [0, 2, 2]])
    np.testing.assert_array_equal(triangle_similarity(SparseMatrix.zeros(1)).to_dense(), [[1]])


def test_triangle_similarity_rejects_weighted():
    with pytest.raises(ValueError):
        triangle_similarity(SparseMatrix.from_dense([[0, 2], [2, 0]]))


def test_triangle_similarity_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(1, 13))
        a = random_adjacency(rng, n, 0.3)
        out = triangle_similarity(SparseMatrix.from_dense(a))
        out.validate()
        np.testing.assert_array_equal(out.to_dense(), dense_triangle(a))


def test_first_nn_path_tie_breaks_low():
    ahat = SparseMatrix.from_dense([[2, 2, 0], [2, 3, 2], [0, 2, 2]])
    out = first_nn(ahat).to_dense()
    np.testing.assert_array_equal(out, path_graph())


def test_first_nn_keep_ties():
    ahat = SparseMatrix.from_dense([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    np.testing.assert_array_equal(first_nn(ahat).to_dense(), [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    ahat = SparseMatrix.from_dense([[0, 1, 1, 0], [1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0]])
    lowest = first_nn(ahat).to_dense()
    assert lowest[0, 1] == 1
    assert first_nn(ahat, keep_ties=True).to_dense()[0, 2] == 1


def test_first_nn_star():
    ahat = np.full((5, 5), 1.0)
    ahat[:, 2] = ahat[2, :] = 5.0
    out = first_nn(SparseMatrix.from_dense(ahat)).to_dense()
    star = np.zeros((5, 5))
    star[2, [0, 1, 3, 4]] = star[[0, 1, 3, 4], 2] = 1
    np.testing.assert_array_equal(out, star)


def test_first_nn_zero():
    assert first_nn(SparseMatrix.zeros(4)).nnz == 0


def test_first_nn_oracle_and_coverage(rng):
    for _ in range(200):
        n = int(rng.integers(1, 13))
        ahat = dense_triangle(random_adjacency(rng, n, 0.3))
        out = first_nn(SparseMatrix.from_dense(ahat))
        dense = out.to_dense()
        np.testing.assert_array_equal(dense, dense_first_nn(ahat))
        assert out.is_symmetric() and out.is_binary()
        off = ahat - np.diag(np.diag(ahat))
        for i in np.flatnonzero(off.max(axis=1, initial=0) > 0):
            assert dense[i].any()


def test_edge_topology_identical_views():
    a = path_graph(4)
    e = extract_edge_topology(multigraph_of([a, a]))
    np.testing.assert_array_equal(e.to_dense(), a)


def test_edge_topology_disjoint_views():
    a, b = np.zeros((3, 3)), np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 1
    b[1, 2] = b[2, 1] = 1
    assert extract_edge_topology(multigraph_of([a, b])).nnz == 0


def test_subgraph_topology_complete():
    """Three K3 views give back K3 only when tied neighbours are kept; the lowest-index rule drops 1-2"""
    k3 = complete_graph()
    s = extract_subgraph_topology(multigraph_of([k3, k3, k3]))
    # every node's tie breaks to its lowest neighbour: 0-1, 1-0, 2-0
    np.testing.assert_array_equal(s.to_dense(), [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    s = extract_subgraph_topology(multigraph_of([k3, k3, k3]), keep_ties=True)
    np.testing.assert_array_equal(s.to_dense(), k3)


def test_subgraph_topology_disjoint():
    a, b = np.zeros((4, 4)), np.zeros((4, 4))
    a[0, 1] = a[1, 0] = 1
    b[2, 3] = b[3, 2] = 1
    assert extract_subgraph_topology(multigraph_of([a, b])).nnz == 0


def test_subgraph_topology_weighted_view_skips_triangles():
    w = np.array([[0, 0.5, 0.9], [0.5, 0, 0.1], [0.9, 0.1, 0]])
    s = extract_subgraph_topology(multigraph_of([w, w]))
    np.testing.assert_array_equal(s.to_dense(), dense_first_nn(w))


def test_topologies_match_dense_pipeline():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(2, 5))
        views = [random_adjacency(rng, n, 0.3) for _ in range(m)]
        g = multigraph_of(views)
        e = extract_edge_topology(g)
        s = extract_subgraph_topology(g)
        np.testing.assert_array_equal(e.to_dense(), dense_vote(views, 2))
        np.testing.assert_array_equal(s.to_dense(), dense_vote([dense_first_nn(dense_triangle(v)) for v in views], 2))
        for t in (e, s):
            t.validate()
            assert t.is_binary() or t.nnz == 0
            assert t.is_symmetric()


def test_edge_topology_monotone_in_threshold(rng):
    g = random_multigraph(rng, 10, 4, p=0.5)
    tops = [extract_edge_topology(g, VoteConfig(t)).to_dense() for t in (2, 3, 4)]
    for loose, strict in zip(tops, tops[1:]):
        assert np.all(strict <= loose)
    union = sum(v.to_dense() > 0 for v in g.views) > 0
    assert np.all(tops[0] <= union)


def test_vote_config_bounds():
    with pytest.raises(ValueError):
        VoteConfig(1).check(3)
    with pytest.raises(ValueError):
        VoteConfig(4).check(3)
    VoteConfig(3).check(3)


def test_topology_is_deterministic(rng):
    g = random_multigraph(rng, 12, 3)
    assert extract_subgraph_topology(g) == extract_subgraph_topology(g)
    assert extract_edge_topology(g) == extract_edge_topology(g)


def test_topology_stats():
    stats = topology_stats(SparseMatrix.from_dense(path_graph(4)))
    assert stats == {"n": 4, "nnz": 6, "density": 6 / 16, "components": 1}
    assert topology_stats(SparseMatrix.zeros(3))["components"] == 3
