import logging

import numpy as np
import pytest
import scipy.sparse as sp

from fastmice.graph import DegenerateSampleError
from fastmice.kmeans import KMeansConfig, kmeans
from fastmice.rng import SeedStream
from fastmice.transfercut import lift, partition, reduce, solve_reduced, spectral_embedding
from conftest import same_partition
from oracles import d_projector, full_graph, full_graph_eigs, random_bipartite


def test_reduce_identity():
    g = reduce(sp.identity(5, format="csr"))
    np.testing.assert_array_equal(g.e_s, np.eye(5))
    np.testing.assert_array_equal(g.row_degrees, np.ones(5))


def test_reduce_single_row():
    g = reduce(sp.csr_matrix([[0.5, 0.5]]))
    np.testing.assert_allclose(g.row_degrees, [1.0])
    np.testing.assert_allclose(g.e_s, [[0.25, 0.25], [0.25, 0.25]], atol=1e-15)


def test_reduce_matches_dense_formula(rng):
    b, _ = random_bipartite(rng, 50, 8, 3)
    dense = b.toarray()
    expected = dense.T @ np.diag(1.0 / dense.sum(axis=1)) @ dense
    g = reduce(b)
    np.testing.assert_allclose(g.e_s, expected, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(g.e_s, g.e_s.T, atol=1e-12)
    np.testing.assert_allclose(g.d_s, dense.sum(axis=0), rtol=1e-12)


def test_reduce_drops_zero_columns():
    b = sp.csr_matrix(np.array([[1.0, 0.0, 2.0], [1.0, 0.0, 1.0]]))
    g = reduce(b)
    np.testing.assert_array_equal(g.kept_columns, [0, 2])
    assert g.size == 2 and np.all(g.d_s > 0)


def test_reduce_empty_row():
    with pytest.raises(DegenerateSampleError):
        reduce(sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]])))


def test_zero_eigenvalue_multiplicity_equals_components():
    # three disconnected blocks of anchors
    blocks = [np.ones((4, 2)), np.ones((5, 3)), np.ones((3, 2))]
    b = sp.csr_matrix(sp.block_diag(blocks))
    sys = solve_reduced(reduce(b), 5)
    np.testing.assert_allclose(sys.deltas[:3], 0.0, atol=1e-12)
    assert sys.deltas[3] > 1e-6


def test_two_by_two_closed_form(caplog):
    b = sp.csr_matrix([[0.5, 0.5]])
    g = reduce(b)
    sys = solve_reduced(g, 2)
    np.testing.assert_allclose(sys.deltas, [0.0, 1.0], atol=1e-12)
    with caplog.at_level(logging.WARNING):
        lifted = lift(sys, b, g)
    assert lifted.n_pairs == 1
    assert "discarding" in caplog.text


def test_solve_errors(rng):
    g = reduce(random_bipartite(rng, 20, 4, 2)[0])
    with pytest.raises(ValueError):
        solve_reduced(g, 5)


def test_residual_and_normalization(rng):
    for _ in range(5):
        b, _ = random_bipartite(rng, 120, 15, 3)
        g = reduce(b)
        sys = solve_reduced(g, 6)
        ls = np.diag(g.d_s) - g.e_s
        for i in range(6):
            u = sys.u_vectors[:, i]
            assert np.linalg.norm(ls @ u - sys.deltas[i] * g.d_s * u) <= 1e-8
        gram = sys.u_vectors.T @ (g.d_s[:, None] * sys.u_vectors)
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-10)
        assert sys.deltas[0] == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.diff(sys.deltas) >= -1e-12)


@pytest.mark.parametrize("delta,lam", [(0.0, 0.0), (0.75, 0.5), (0.96, 0.8)])
def test_eigen_map_values(delta, lam):
    from fastmice.transfercut import EigenSystem, ReducedGraph

    g = ReducedGraph(np.eye(1), np.ones(1), np.ones(1), np.arange(1), 1)
    sys = lift(EigenSystem(np.array([delta]), np.ones((1, 1))), sp.csr_matrix([[1.0]]), g)
    assert sys.lambdas[0] == pytest.approx(lam, abs=1e-15)
    assert sys.lambdas[0] * (2 - sys.lambdas[0]) == pytest.approx(delta, abs=1e-12)


def test_trivial_pair_lift(rng):
    b, _ = random_bipartite(rng, 40, 6, 2)
    g = reduce(b)
    sys = lift(solve_reduced(g, 1), b, g)
    assert sys.lambdas[0] == pytest.approx(0.0, abs=1e-8)
    h = (b @ sys.u_vectors[:, 0]) / g.row_degrees / (1 - sys.lambdas[0])
    np.testing.assert_allclose(sys.h_vectors[:, 0], h, rtol=1e-12)


def test_lifted_pairs_solve_full_graph(rng):
    b, _ = random_bipartite(rng, 60, 10, 3)
    g = reduce(b)
    sys = lift(solve_reduced(g, 4), b, g)
    _, d, lap = full_graph(b)
    for i in range(sys.n_pairs):
        y = np.concatenate([sys.h_vectors[:, i], sys.u_vectors[:, i]])
        assert np.linalg.norm(lap @ y - sys.lambdas[i] * d * y) <= 1e-6
        assert sys.lambdas[i] * (2 - sys.lambdas[i]) == pytest.approx(sys.deltas[i], abs=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_eigen_lift_against_full_graph_oracle(seed):
    gen = np.random.default_rng(seed)
    n, p, k = int(gen.integers(30, 200)), int(gen.integers(6, 21)), int(gen.integers(1, 6))
    b, _ = random_bipartite(gen, n, p, int(gen.integers(2, 5)))
    g = reduce(b)
    sys = lift(solve_reduced(g, k), b, g)
    vals, vecs, d = full_graph_eigs(b, k + 1)
    np.testing.assert_allclose(sys.lambdas, vals[:k], atol=1e-8)
    if vals[k] - vals[k - 1] > 1e-6:
        ours = np.vstack([sys.h_vectors, sys.u_vectors]) / np.sqrt(2.0)
        diff = d_projector(ours, d) - d_projector(vecs[:, :k], d)
        assert np.linalg.norm(diff) <= 1e-6


def test_scale_invariance(rng):
    b, _ = random_bipartite(rng, 150, 12, 3, n_blocks=3)
    base = solve_reduced(reduce(b), 4).deltas
    labels = partition(b, 3, KMeansConfig(3), SeedStream(0))
    for c in (2.0, 0.125, 3.7):
        np.testing.assert_allclose(solve_reduced(reduce(b * c), 4).deltas, base, atol=1e-12)
        assert same_partition(partition(b * c, 3, KMeansConfig(3), SeedStream(0)), labels)


def test_partition_connected_blocks():
    b = sp.csr_matrix(sp.block_diag([np.ones((6, 3)), np.ones((4, 2))]))
    labels = partition(b, 2, KMeansConfig(2), SeedStream(1))
    assert len(set(labels[:6])) == 1 and len(set(labels[6:])) == 1
    assert labels[0] != labels[6]


def test_partition_k1(rng):
    b, _ = random_bipartite(rng, 20, 4, 2)
    np.testing.assert_array_equal(partition(b, 1, None, SeedStream(0)), 0)


def test_padding_when_pairs_missing(caplog):
    b = sp.csr_matrix([[0.5, 0.5]])
    with caplog.at_level(logging.WARNING):
        emb, sys = spectral_embedding(b, 2)
    assert emb.shape == (1, 2) and sys.n_pairs == 1
    np.testing.assert_array_equal(emb[:, 1], 0.0)
    assert "padding" in caplog.text


def test_toy_matches_full_graph_spectral_clustering():
    gen = np.random.default_rng(3)
    b, blocks = random_bipartite(gen, 60, 12, 3, n_blocks=3, noise=0.05)
    ours = partition(b, 3, KMeansConfig(3), SeedStream(4))
    _, vecs, _ = full_graph_eigs(b, 3)
    emb = vecs[:60]
    emb = emb / np.linalg.norm(emb, axis=1, keepdims=True)
    oracle = kmeans(emb, KMeansConfig(3), SeedStream(4)).labels
    assert same_partition(ours, oracle)
