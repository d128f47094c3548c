"""Reduction baselines and their equivalences with the complex network."""

import numpy as np
import pytest

from hypermag import (
    ModelConfig,
    PropagationOperator,
    RealPropagator,
    TransitionMatrix,
    clique_gcn_propagator,
    hgnn_star_laplacian,
    spectral_clustering_majority,
    train_real_gcn,
    zhou_laplacian,
)
from hypermag.baselines import (
    _adam_step,
    _real_backward,
    evaluate_real,
    init_real_state,
    real_forward,
)
from hypermag.network import adam_step, backward, forward, init_state

from conftest import random_connected_hypergraph, random_edvw, triangle_hypergraph


def test_zhou_laplacian_formula_and_spectrum():
    for seed in range(10):
        local = np.random.default_rng(1100 + seed)
        h = random_connected_hypergraph(local)
        prop = zhou_laplacian(h)
        y = h.incidence().toarray()
        d = h.vertex_degrees()
        core = y @ np.diag(h.edge_weights / h.edge_degrees()) @ y.T
        core /= np.sqrt(d[:, None] * d[None, :])
        expected = np.eye(h.n_vertices) - core
        np.testing.assert_allclose(prop.laplacian, expected, atol=1e-12)
        eigs = np.linalg.eigvalsh(prop.laplacian)
        assert eigs.min() >= -1e-8 and eigs.max() <= 2 + 1e-8
        np.testing.assert_allclose(prop.matrix, np.eye(h.n_vertices) - prop.laplacian,
                                   atol=1e-12)


def test_hgnn_star_at_incidence_equals_zhou():
    for seed in range(10):
        local = np.random.default_rng(1200 + seed)
        h = random_connected_hypergraph(local)
        a = zhou_laplacian(h)
        b = hgnn_star_laplacian(h, h.incidence())
        assert np.abs(a.laplacian - b.laplacian).max() <= 1e-12


def test_hgnn_star_differs_under_nonuniform_edvw(rng):
    h = random_connected_hypergraph(rng, n_max=12, m_max=20)
    r = random_edvw(rng, h)
    a = zhou_laplacian(h)
    b = hgnn_star_laplacian(h, r)
    assert np.abs(a.laplacian - b.laplacian).max() > 1e-6


def test_clique_gcn_propagator_properties():
    h = triangle_hypergraph()
    prop = clique_gcn_propagator(h)
    assert np.array_equal(prop.matrix, prop.matrix.T)
    eigs = np.linalg.eigvalsh(prop.matrix)
    assert eigs.min() >= -1.0 - 1e-10 and eigs.max() <= 1.0 + 1e-10
    # row of the renormalized adjacency: (A + I) scaled by 1/sqrt(deg_u deg_v)
    adj = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
    deg = adj.sum(axis=1)
    np.testing.assert_allclose(prop.matrix, adj / np.sqrt(deg[:, None] * deg[None, :]),
                               atol=1e-12)


def test_real_propagator_rejects_asymmetry():
    with pytest.raises(ValueError):
        RealPropagator(matrix=np.array([[0.0, 1.0], [0.0, 0.0]]), laplacian=None,
                       kind="bad")


def two_blob_problem(seed, n_per=12):
    local = np.random.default_rng(seed)
    n = 2 * n_per
    labels = np.repeat([0, 1], n_per)
    adj = np.full((n, n), 0.02)
    adj[:n_per, :n_per] = 1.0
    adj[n_per:, n_per:] = 1.0
    np.fill_diagonal(adj, 0.0)
    features = local.standard_normal((n, 4))
    features[:, 0] += labels * 1.5
    train = local.uniform(size=n) < 0.5
    train[0] = train[n_per] = True
    return adj, features, labels, train


def test_spectral_clustering_separates_blobs():
    adj, _, labels, train = two_blob_problem(1)
    predicted, accuracy = spectral_clustering_majority(adj, 2, labels, train, seed=0)
    assert accuracy == 1.0
    assert predicted.shape == labels.shape


def test_spectral_clustering_is_deterministic():
    adj, _, labels, train = two_blob_problem(2)
    first = spectral_clustering_majority(adj, 2, labels, train, seed=3)
    second = spectral_clustering_majority(adj, 2, labels, train, seed=3)
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]


def test_real_gcn_learns_blobs():
    adj, features, labels, train = two_blob_problem(3)
    deg = adj.sum(axis=1)
    matrix = adj / np.sqrt(deg[:, None] * deg[None, :])
    prop = RealPropagator(matrix=(matrix + matrix.T) / 2.0, laplacian=None,
                          kind="blob")
    config = ModelConfig(n_classes=2, hidden_dims=8, epochs=80,
                         learning_rate=0.01, seed=3)
    state, history = train_real_gcn(prop, features, labels, config,
                                    train_mask=train, test_mask=~train)
    assert history[-1][1] < history[0][1]
    assert evaluate_real(state, features, labels, ~train) >= 0.9


def test_real_gcn_is_deterministic():
    adj, features, labels, train = two_blob_problem(4)
    prop = RealPropagator(matrix=(adj + adj.T) / 2.0, laplacian=None, kind="blob")
    config = ModelConfig(n_classes=2, hidden_dims=6, epochs=10, seed=4)
    runs = [train_real_gcn(prop, features, labels, config) for _ in range(2)]
    assert runs[0][1] == runs[1][1]
    for name, param in runs[0][0].named_parameters().items():
        assert np.array_equal(param, runs[1][0].named_parameters()[name])


def symmetric_transition(seed, n=14):
    # banded circulant walk: symmetric and row-stochastic by construction
    local = np.random.default_rng(seed)
    bands = local.uniform(0.2, 1.0, size=3)
    bands /= 2.0 * bands.sum()
    values = np.zeros((n, n))
    for offset, weight in enumerate(bands, start=1):
        for i in range(n):
            values[i, (i + offset) % n] += weight
            values[i, (i - offset) % n] += weight
    return TransitionMatrix(values=values, kind="raw")


def test_zero_charge_matches_real_gcn_layerwise():
    """With q = 0 and a symmetric walk the complex network collapses to the
    real GCN: activations stay real and match layer by layer, and after head
    surgery (real head = top half of the complex head) training trajectories
    coincide."""
    p = symmetric_transition(5)
    # symmetric walk: P_s = P, so the complex magnitude operator is symmetric
    prop_c = PropagationOperator.from_transition(p)
    np.testing.assert_allclose(p.values, p.values.T, atol=1e-15)
    prop_r = RealPropagator(matrix=prop_c.magnitude, laplacian=None, kind="q0")

    local = np.random.default_rng(50)
    features = local.standard_normal((14, 5))
    labels = local.integers(0, 2, size=14)
    train = local.uniform(size=14) < 0.7
    train[0] = True

    config = ModelConfig(n_classes=2, n_layers=2, hidden_dims=6, epochs=1,
                         charge_mode="scalar", charge_init=0.0,
                         learning_rate=0.01, weight_decay=0.001, seed=50)
    state_c = init_state(config, 5, prop_c)
    state_r = init_real_state(config, 5, prop_r)
    for l in range(2):
        assert np.array_equal(state_c.w_self[l], state_r.w_self[l])
        assert np.array_equal(state_c.w_neigh[l], state_r.w_neigh[l])
    state_r.w_head = state_c.w_head[:6].copy()
    state_r.adam_m["w_head"] = np.zeros_like(state_r.w_head)
    state_r.adam_v["w_head"] = np.zeros_like(state_r.w_head)

    for step in range(5):
        logits_c, caches_c = forward(state_c, features)
        logits_r, caches_r = real_forward(state_r, features)
        for l in range(2):
            layer_c = caches_c.xs[l + 1]
            assert np.abs(layer_c.imag).max() == 0.0
            np.testing.assert_allclose(layer_c.real, caches_r[0][l + 1],
                                       atol=1e-12, err_msg=f"step {step} layer {l}")
        np.testing.assert_allclose(logits_c, logits_r, atol=1e-11)
        grads_c = backward(caches_c, labels, train, config.weight_decay)
        grads_r = _real_backward(state_r, caches_r, logits_r, labels, train,
                                 config.weight_decay)
        np.testing.assert_allclose(grads_c["w_head"][:6], grads_r["w_head"],
                                   atol=1e-12)
        for l in range(2):
            np.testing.assert_allclose(grads_c[f"w_self/{l}"], grads_r[f"w_self/{l}"],
                                       atol=1e-12)
        adam_step(state_c, grads_c)
        _adam_step(state_r, grads_r)
