"""Random walks: transition construction, stationarity, reversibility, hitting.

Oracles: hand-computed rows for the two-edge path, the closed-form stationary
vector d(v)/vol for the edge-weighted walk, Monte-Carlo simulation of the
two-step edge/vertex draw, and Monte-Carlo hitting times.
"""

import numpy as np
import pytest

from hypermag import (
    Hypergraph,
    TransitionMatrix,
    edvw_transition,
    hitting_times,
    is_reversible,
    representative_digraph,
    stationary_distribution,
    unified_transition,
    zhou_transition,
)
from hypermag.walks import ConvergenceError

from conftest import random_connected_hypergraph, random_edvw, triangle_hypergraph


def test_transition_matrix_validation():
    with pytest.raises(ValueError):
        TransitionMatrix(values=np.array([[0.5, 0.4], [0.5, 0.5]]), kind="raw")
    with pytest.raises(ValueError):
        TransitionMatrix(values=np.array([[1.5, -0.5], [0.5, 0.5]]), kind="raw")
    with pytest.raises(ValueError):
        TransitionMatrix(values=np.ones((2, 3)) / 3.0, kind="raw")


def test_zhou_rows_on_two_edge_path():
    # edges {0,1} and {1,2}, unit weights: from 1 either edge w.p. 1/2, then a
    # uniform member, so row 1 is (1/4, 1/2, 1/4)
    p = zhou_transition(triangle_hypergraph()).values
    np.testing.assert_allclose(p[0], [0.5, 0.5, 0.0], atol=1e-15)
    np.testing.assert_allclose(p[1], [0.25, 0.5, 0.25], atol=1e-15)
    np.testing.assert_allclose(p[2], [0.0, 0.5, 0.5], atol=1e-15)


def test_zhou_stationary_is_degree_over_volume(rng):
    # the edge-weighted walk is in detailed balance with d(v)/vol
    for seed in range(10):
        local = np.random.default_rng(seed)
        h = random_connected_hypergraph(local)
        p = zhou_transition(h)
        pi = stationary_distribution(p, lazy=True)
        d = h.vertex_degrees()
        np.testing.assert_allclose(pi.values, d / d.sum(), atol=1e-9)


def test_zhou_reversible_sweep():
    for seed in range(10):
        local = np.random.default_rng(100 + seed)
        h = random_connected_hypergraph(local)
        p = zhou_transition(h)
        reversible, residual = is_reversible(p, stationary_distribution(p, lazy=True))
        assert reversible, f"seed {seed}: residual {residual}"


def test_isolated_vertex_rejected():
    h = Hypergraph(n_vertices=3, edges=((0, 1),), edge_weights=np.ones(1))
    with pytest.raises(ValueError, match="2"):
        zhou_transition(h)


def test_edvw_requires_normalized(rng):
    h = triangle_hypergraph()
    raw = random_edvw(rng, h)
    with pytest.raises(ValueError):
        edvw_transition(h, raw)
    p = edvw_transition(h, raw.normalize(h))
    np.testing.assert_allclose(p.values.sum(axis=1), np.ones(3), atol=1e-12)


def test_uniform_edvw_collapses_to_zhou():
    for seed in range(10):
        local = np.random.default_rng(200 + seed)
        h = random_connected_hypergraph(local)
        from hypermag import EdvwMatrix
        uniform = EdvwMatrix(values=h.incidence()).normalize(h)
        p_edvw = edvw_transition(h, uniform).values
        p_zhou = zhou_transition(h).values
        assert np.abs(p_edvw - p_zhou).max() <= 1e-12


def _mc_row(rng, h, gamma, u, n_draws):
    """Simulate the two-step draw: edge by weight, then member by gamma."""
    edges_u = [j for j, e in enumerate(h.edges) if u in e]
    w = h.edge_weights[edges_u]
    counts = rng.multinomial(n_draws, w / w.sum())
    hist = np.zeros(h.n_vertices)
    for j, c in zip(edges_u, counts):
        members = np.array(h.edges[j])
        probs = gamma[members, j] / gamma[members, j].sum()
        hist[members] += rng.multinomial(c, probs)
    return hist / n_draws


def test_zhou_row_matches_monte_carlo(rng):
    h = Hypergraph(n_vertices=5, edges=((0, 1, 2), (1, 3), (0, 3, 4), (2, 4)),
                   edge_weights=np.array([1.0, 2.0, 0.5, 1.5]))
    p = zhou_transition(h).values
    n_draws = 400_000
    gamma = h.incidence().toarray()
    for u in (0, 3):
        empirical = _mc_row(rng, h, gamma, u, n_draws)
        sigma = np.sqrt(np.maximum(p[u] * (1 - p[u]), 1e-12) / n_draws)
        assert np.all(np.abs(empirical - p[u]) <= 3 * sigma + 1e-9), (
            f"row {u}: {empirical} vs {p[u]}")


def test_edvw_row_matches_monte_carlo(rng):
    h = Hypergraph(n_vertices=5, edges=((0, 1, 2), (1, 3), (0, 3, 4), (2, 4)),
                   edge_weights=np.array([1.0, 2.0, 0.5, 1.5]))
    r = random_edvw(rng, h, normalized=True)
    p = edvw_transition(h, r).values
    n_draws = 400_000
    gamma = r.dense
    for u in (0, 4):
        empirical = _mc_row(rng, h, gamma, u, n_draws)
        sigma = np.sqrt(np.maximum(p[u] * (1 - p[u]), 1e-12) / n_draws)
        assert np.all(np.abs(empirical - p[u]) <= 3 * sigma + 1e-9), (
            f"row {u}: {empirical} vs {p[u]}")


def test_skewed_edvw_is_non_reversible():
    # opposing per-edge rankings of the shared vertices break detailed balance
    from hypermag import skewed_edvw_example

    h, edvw = skewed_edvw_example()
    p = edvw_transition(h, edvw.normalize(h))
    pi = stationary_distribution(p, lazy=True)
    reversible, residual = is_reversible(p, pi)
    assert not reversible
    assert residual > 0.01


def test_stationary_two_state_analytic():
    p = TransitionMatrix(values=np.array([[0.9, 0.1], [0.5, 0.5]]), kind="raw")
    pi = stationary_distribution(p)
    np.testing.assert_allclose(pi.values, [5.0 / 6.0, 1.0 / 6.0], atol=1e-12)
    assert pi.residual <= 1e-10


def test_stationary_reducible_rejected():
    p = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError, match="reducible"):
        stationary_distribution(p)


def test_stationary_periodic_chain():
    # bipartite star 0 <-> {1, 2}: period 2, stationary (1/2, 1/4, 1/4)
    p = np.array([[0.0, 0.5, 0.5], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    pi_lazy = stationary_distribution(p, lazy=True)
    np.testing.assert_allclose(pi_lazy.values, [0.5, 0.25, 0.25], atol=1e-10)
    # plain power iteration oscillates; the dense fallback still solves it
    pi_fallback = stationary_distribution(p, max_iter=50)
    np.testing.assert_allclose(pi_fallback.values, [0.5, 0.25, 0.25], atol=1e-10)
    assert pi_fallback.method == "dense"


def test_stationary_random_sweep_against_eigenvector(rng):
    for seed in range(10):
        local = np.random.default_rng(300 + seed)
        p = random_stochastic_local(local, int(local.integers(2, 12)))
        pi = stationary_distribution(p)
        # left eigenvector oracle from the dense eigenproblem
        w, v = np.linalg.eig(p.values.T)
        k = int(np.argmin(np.abs(w - 1.0)))
        target = np.real(v[:, k])
        target = np.abs(target) / np.abs(target).sum()
        np.testing.assert_allclose(pi.values, target, atol=1e-8)


def random_stochastic_local(rng, n):
    mat = rng.uniform(0.05, 1.0, size=(n, n))
    return TransitionMatrix(values=mat / mat.sum(axis=1, keepdims=True), kind="raw")


def test_unified_matches_edvw_walk(rng):
    for seed in range(10):
        local = np.random.default_rng(400 + seed)
        h = random_connected_hypergraph(local)
        r = random_edvw(local, h, normalized=True)
        p_edvw = edvw_transition(h, r).values
        p_uni = unified_transition(h, h.incidence(), r, rho="inverse").values
        assert np.abs(p_uni - p_edvw).max() <= 1e-12


def test_unified_equal_factors_reversible(rng):
    for seed in range(10):
        local = np.random.default_rng(500 + seed)
        h = random_connected_hypergraph(local)
        q2 = random_edvw(local, h)
        k = float(local.uniform(0.5, 3.0))
        scaled = q2.values * k
        for rho in ("inverse", "identity"):
            p = unified_transition(h, scaled, q2, rho=rho)
            pi = stationary_distribution(p, lazy=True)
            reversible, residual = is_reversible(p, pi)
            assert reversible, f"seed {seed} rho {rho}: residual {residual}"


def test_unified_rejects_support_outside_incidence():
    h = triangle_hypergraph()
    bad = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])  # (0, e2) not incident
    with pytest.raises(ValueError, match="support"):
        unified_transition(h, h.incidence(), bad)


def test_hitting_times_two_state_analytic():
    p = np.array([[0.7, 0.3], [0.5, 0.5]])
    h = hitting_times(p)
    np.testing.assert_allclose(h[0, 1], 1.0 / 0.3, atol=1e-10)
    np.testing.assert_allclose(h[1, 0], 1.0 / 0.5, atol=1e-10)
    assert h[0, 0] == 0.0 and h[1, 1] == 0.0


def test_hitting_times_complete_triangle():
    # uniform walk on the complete graph over three states: h(u, v) = 2
    p = (np.ones((3, 3)) - np.eye(3)) / 2.0
    h = hitting_times(p)
    off = h[~np.eye(3, dtype=bool)]
    np.testing.assert_allclose(off, np.full(6, 2.0), atol=1e-10)


def test_hitting_times_match_monte_carlo(rng):
    p = np.array([
        [0.1, 0.6, 0.3],
        [0.4, 0.2, 0.4],
        [0.25, 0.25, 0.5],
    ])
    analytic = hitting_times(p)
    n_walks, cap = 60_000, 10_000
    cum = p.cumsum(axis=1)
    for target in (1, 2):
        states = np.zeros(n_walks, dtype=int)
        steps = np.zeros(n_walks)
        alive = np.ones(n_walks, dtype=bool)
        for _ in range(cap):
            if not alive.any():
                break
            u = rng.uniform(size=alive.sum())
            states[alive] = (cum[states[alive]] < u[:, None]).sum(axis=1)
            steps[alive] += 1
            alive &= states != target
        assert not alive.any()
        sem = steps.std(ddof=1) / np.sqrt(n_walks)
        assert abs(steps.mean() - analytic[0, target]) <= 3 * sem + 1e-9


def test_representative_digraph_row_major():
    p = zhou_transition(triangle_hypergraph())
    arcs = representative_digraph(p)
    assert arcs[0] == (0, 0, 0.5)
    assert arcs[1] == (0, 1, 0.5)
    assert [a[:2] for a in arcs] == [
        (0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]
    totals = {}
    for u, _, w in arcs:
        totals[u] = totals.get(u, 0.0) + w
    assert all(abs(t - 1.0) <= 1e-12 for t in totals.values())


def test_convergence_error_carries_residual():
    err = ConvergenceError("no luck", 0.125)
    assert err.residual == 0.125
