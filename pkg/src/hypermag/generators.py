"""Planted hypergraph generator with a tunable direction signal.

Classes are assigned round-robin, so they are balanced.  Each hyperedge is
anchored to a class and fills a binomial share of its slots from that class
(``p_within``); with probability ``p_noise`` an edge is instead drawn
uniformly.  Members are dealt from shuffled per-class queues, which keeps
vertex degrees within one of each other and guarantees full coverage even at
low average degree.  The EDVW makes members of the anchor class attractive inside
their own edges, with a per-class strength, so the induced walk drifts along
a class ordering: this is a genuinely edge-dependent weighting, the walk is
non-reversible, and the direction of probability flow between two vertices
encodes their class pair.  ``direction_signal`` = 0 removes the skew (all
weights 1, the edge-independent case).

Features are deliberately weak: a constant column, a faint noisy class
indicator, and pure noise, calibrated so that a feature-only classifier
stays well under 70 percent accuracy while the walk direction carries the
rest of the signal.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .hypergraph import EdvwMatrix, Hypergraph

__all__ = ["generate_planted_hypergraph", "skewed_edvw_example"]

EDGE_SIZE = 6
GAMMA_CONTRAST = 25.0
FEATURE_SHIFT = 0.6
NOISE_FEATURES = 2
_MAX_ATTEMPTS = 50


class _Dealer:
    """Deals vertices from a pool in shuffled rounds.

    Every member of the pool is dealt once per round, so coverage is
    guaranteed as soon as a round completes and vertex degrees stay within
    one of each other.  Nearly equal degrees matter: the walk divides by the
    vertex degree, so degree spread would leak spurious asymmetry into
    same-class pairs.
    """

    def __init__(self, rng, pool):
        self.rng = rng
        self.pool = np.asarray(pool)
        self.queue: list[int] = []

    def deal(self, k, taken):
        out = []
        stash = []
        while len(out) < k:
            if not self.queue:
                self.queue = [int(v) for v in self.rng.permutation(self.pool)]
            v = self.queue.pop()
            if v in taken or v in out:
                stash.append(v)
            else:
                out.append(v)
        self.queue.extend(stash)
        return out


def _sample_edges(rng, n, labels, n_classes, edges_per_class, p_within, p_noise):
    dealers = [_Dealer(rng, np.flatnonzero(labels == c)) for c in range(n_classes)]
    out_dealers = [_Dealer(rng, np.flatnonzero(labels != c)) for c in range(n_classes)]
    edges, anchors = [], []
    for j in range(n_classes * edges_per_class):
        anchor = j % n_classes
        if rng.random() < p_noise:
            members = rng.choice(n, size=EDGE_SIZE, replace=False)
            anchors.append(-1)  # unanchored: carries no direction signal
        else:
            inside = int(np.count_nonzero(labels == anchor))
            k_in = int(rng.binomial(EDGE_SIZE, p_within))
            k_in = min(max(k_in, 1), min(EDGE_SIZE, inside))
            k_out = min(EDGE_SIZE - k_in, n - inside)
            members = dealers[anchor].deal(k_in, ())
            members += out_dealers[anchor].deal(k_out, members)
            anchors.append(anchor)
        edges.append(tuple(sorted(int(v) for v in members)))
    return edges, anchors


def _is_connected(n, edges) -> bool:
    rows, cols = [], []
    for edge in edges:
        for v in edge:
            rows.append(edge[0])
            cols.append(v)
    union = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_components, _ = connected_components(union, directed=False)
    return n_components == 1


def skewed_edvw_example():
    """Smallest skewed-EDVW walk with a visibly non-reversible chain.

    Three vertices, hyperedges {0, 1, 2} and {0, 1} with unit weights.  The
    big edge ranks its members 1 < 5 < 9 while the small edge reverses the
    preference (9 over 1); the opposing rankings break detailed balance with
    a flow residual near 0.063.  Returns (hypergraph, edvw).
    """
    hypergraph = Hypergraph(
        n_vertices=3,
        edges=((0, 1, 2), (0, 1)),
        edge_weights=np.ones(2),
    )
    gamma = np.array([
        [1.0, 9.0],
        [5.0, 1.0],
        [9.0, 0.0],
    ])
    edvw = EdvwMatrix(values=sp.csr_matrix(gamma), normalized=False)
    return hypergraph, edvw


def generate_planted_hypergraph(n: int = 400, n_classes: int = 2,
                                edges_per_class: int = 170,
                                p_within: float = 0.5, p_noise: float = 0.05,
                                direction_signal: float = 0.8, seed: int = 0):
    """Planted-class hypergraph with direction-encoded EDVW.

    Returns (hypergraph, edvw, features, labels); the hypergraph also carries
    the labels and features.  All vertices are covered and the hypergraph is
    connected (resampled under derived seeds if a draw misses).
    """
    if n_classes < 2:
        raise ValueError("need at least two classes")
    if n < n_classes * EDGE_SIZE:
        raise ValueError(f"need at least {n_classes * EDGE_SIZE} vertices")
    if edges_per_class < 1:
        raise ValueError("edges_per_class must be positive")
    if not (0 <= p_within <= 1 and 0 <= p_noise <= 1):
        raise ValueError("p_within and p_noise must lie in [0, 1]")
    if not 0 <= direction_signal <= 1:
        raise ValueError("direction_signal must lie in [0, 1]")

    labels = np.arange(n) % n_classes

    edges = None
    for attempt in range(_MAX_ATTEMPTS):
        rng = np.random.default_rng([seed, attempt])
        candidate, anchors = _sample_edges(
            rng, n, labels, n_classes, edges_per_class, p_within, p_noise)
        covered = {v for edge in candidate for v in edge}
        if len(covered) == n and _is_connected(n, candidate):
            edges = candidate
            break
    if edges is None:
        raise ValueError("could not draw a connected covering hypergraph; "
                         "increase edges_per_class")

    # Attraction strength grows with the class index, so each class pair has
    # a distinct net flow direction and the weighting is edge-dependent.
    strength = (np.arange(n_classes) + 1.0) / n_classes
    rows, cols, data = [], [], []
    for j, edge in enumerate(edges):
        for v in edge:
            gamma = 1.0
            if anchors[j] >= 0 and labels[v] == anchors[j]:
                gamma += direction_signal * GAMMA_CONTRAST * strength[anchors[j]]
            rows.append(v)
            cols.append(j)
            data.append(gamma)
    edvw = EdvwMatrix(
        values=sp.csr_matrix((data, (rows, cols)), shape=(n, len(edges))),
        normalized=False,
    )

    feat_rng = np.random.default_rng([seed, 10_000])
    n_features = 1 + n_classes + NOISE_FEATURES
    features = feat_rng.standard_normal((n, n_features))
    features[:, 0] = 1.0
    features[np.arange(n), 1 + labels] += FEATURE_SHIFT

    hypergraph = Hypergraph(
        n_vertices=n,
        edges=tuple(edges),
        edge_weights=np.ones(len(edges)),
        vertex_labels=labels,
        vertex_features=features,
    )
    return hypergraph, edvw, features, labels
