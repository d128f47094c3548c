"""Shared random-instance factories for the test suite.

All factories take an explicit rng so every test is reproducible from its own
seed.  Hypergraphs come out connected by construction: a random spanning tree
of pair edges first, then extra random hyperedges.
"""

import numpy as np
import pytest

from hypermag import EdvwMatrix, Hypergraph, TransitionMatrix
import scipy.sparse as sp


def random_connected_hypergraph(rng, n_max=30, m_max=60, unit_weights=False):
    """Connected hypergraph with 3 <= n <= n_max vertices and m <= m_max edges."""
    n = int(rng.integers(3, n_max + 1))
    edges = set()
    order = rng.permutation(n)
    for a, b in zip(order[:-1], order[1:]):
        edges.add((min(a, b), max(a, b)))
    n_extra = int(rng.integers(0, m_max - len(edges) + 1))
    # small n exhausts the distinct edges quickly, so bound the attempts
    for _ in range(20 * m_max):
        if n_extra <= 0:
            break
        size = int(rng.integers(2, min(6, n) + 1))
        edge = tuple(sorted(rng.choice(n, size=size, replace=False)))
        if edge not in edges:
            edges.add(edge)
            n_extra -= 1
    edges = sorted(edges)
    if unit_weights:
        weights = np.ones(len(edges))
    else:
        weights = rng.uniform(0.2, 3.0, size=len(edges))
    return Hypergraph(n_vertices=n, edges=tuple(tuple(map(int, e)) for e in edges),
                      edge_weights=weights)


def random_edvw(rng, hypergraph, normalized=False):
    """EDVW with the hypergraph's exact support and uniform(0.2, 2) entries."""
    rows, cols, data = [], [], []
    for j, edge in enumerate(hypergraph.edges):
        for v in edge:
            rows.append(v)
            cols.append(j)
            data.append(rng.uniform(0.2, 2.0))
    values = sp.csr_matrix(
        (data, (rows, cols)), shape=(hypergraph.n_vertices, hypergraph.n_edges)
    )
    edvw = EdvwMatrix(values=values)
    if normalized:
        return edvw.normalize(hypergraph)
    return edvw


def random_stochastic(rng, n, zero_fraction=0.0):
    """Dense row-stochastic matrix; optionally with some structural zeros."""
    mat = rng.uniform(0.05, 1.0, size=(n, n))
    if zero_fraction > 0:
        mask = rng.uniform(size=(n, n)) < zero_fraction
        np.fill_diagonal(mask, False)
        mat[mask] = 0.0
    return TransitionMatrix(values=mat / mat.sum(axis=1, keepdims=True), kind="raw")


def triangle_hypergraph():
    """Two overlapping pair edges on three vertices; the standard tiny case."""
    return Hypergraph(n_vertices=3, edges=((0, 1), (1, 2)),
                      edge_weights=np.ones(2))


def gradcheck_max_rel_err(state, features, labels, train_mask, weight_decay,
                          step=1e-6, noise_floor=1e-9):
    """Max relative error between analytic and central-FD gradients.

    Coordinates whose +/-step evaluations land on different activation masks
    sit on a boundary and are excluded, as are coordinates whose analytic/FD
    difference is below the FD noise floor.  Returns (max_rel_err, n_checked,
    n_excluded).
    """
    from hypermag import backward, forward, loss

    logits, caches = forward(state, features)
    loss(logits, labels, train_mask, state, weight_decay)
    analytic = backward(caches, labels, train_mask, weight_decay)

    def eval_loss():
        logits_p, caches_p = forward(state, features)
        value = loss(logits_p, labels, train_mask, state, weight_decay)
        return value, [m.copy() for m in caches_p.masks]

    worst, checked, excluded = 0.0, 0, 0
    for name, param in state.named_parameters().items():
        grad = analytic[name]
        flat = param.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            up, masks_up = eval_loss()
            flat[i] = original - step
            down, masks_down = eval_loss()
            flat[i] = original
            if any((mu != md).any() for mu, md in zip(masks_up, masks_down)):
                excluded += 1
                continue
            fd = (up - down) / (2.0 * step)
            diff = abs(gflat[i] - fd)
            checked += 1
            if diff > noise_floor:
                worst = max(worst, diff / max(abs(gflat[i]), abs(fd)))
    return worst, checked, excluded


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
