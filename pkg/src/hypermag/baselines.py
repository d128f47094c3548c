"""Graph-reduction baselines: symmetric hypergraph Laplacians, a real-valued
GCN that runs on them, and spectral clustering with majority-vote labels.

The reductions collapse a hypergraph to a reversible operator.  The classic
normalized hypergraph Laplacian (Zhou) uses uniform in-edge vertex selection;
its EDVW analogue replaces the incidence with the EDVW matrix R and reduces to
Zhou exactly at R = Y.  The real GCN mirrors the complex network with all-real
arithmetic: with a symmetric operator and zero charge the two produce
identical real activations layer by layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from sklearn.cluster import KMeans

from .hypergraph import EdvwMatrix, Hypergraph, clique_expansion
from .network import (
    ModelConfig,
    _accuracy,
    _glorot,
    _log_softmax,
    ADAM_BETA1,
    ADAM_BETA2,
    ADAM_EPS,
    make_split,
)

__all__ = [
    "RealPropagator",
    "RealModelState",
    "zhou_laplacian",
    "hgnn_star_laplacian",
    "clique_gcn_propagator",
    "train_real_gcn",
    "spectral_clustering_majority",
]

SPECTRUM_TOL = 1e-8


@dataclass(frozen=True)
class RealPropagator:
    """Symmetric propagation matrix for real GCN layers, with its Laplacian."""

    matrix: np.ndarray
    laplacian: np.ndarray | None
    kind: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("propagation matrix must be square")
        if np.abs(m - m.T).max() > 1e-12:
            raise ValueError("propagation matrix must be symmetric")


def _symmetric_core(hypergraph: Hypergraph, left: sp.spmatrix) -> np.ndarray:
    """D_V^{-1/2} left W D_E^{-1} left^T D_V^{-1/2}, forced exactly symmetric."""
    d = hypergraph.vertex_degrees()
    if np.any(d == 0):
        v = int(np.argmin(d))
        raise ValueError(f"vertex {v} belongs to no hyperedge")
    scale = hypergraph.edge_weights / hypergraph.edge_degrees()
    core = ((left @ sp.diags(scale)) @ left.T).toarray()
    inv_sqrt = 1.0 / np.sqrt(d)
    core *= inv_sqrt[:, None] * inv_sqrt[None, :]
    return (core + core.T) / 2.0


def zhou_laplacian(hypergraph: Hypergraph, check_spectrum: bool = True) -> RealPropagator:
    """Normalized hypergraph Laplacian Delta = I - D^{-1/2} Y W D_E^{-1} Y^T D^{-1/2}.

    The returned propagator's ``matrix`` is the smoothing form I - Delta used
    inside GCN layers.  Eigenvalues of Delta lie in [0, 2]; checked by a dense
    eigensolve unless ``check_spectrum`` is disabled for large instances.
    """
    smoothing = _symmetric_core(hypergraph, hypergraph.incidence())
    laplacian = np.eye(hypergraph.n_vertices) - smoothing
    if check_spectrum:
        eigenvalues = np.linalg.eigvalsh(laplacian)
        if eigenvalues[0] < -SPECTRUM_TOL or eigenvalues[-1] > 2 + SPECTRUM_TOL:
            raise ValueError("Laplacian spectrum escapes [0, 2]")
    return RealPropagator(matrix=smoothing, laplacian=laplacian, kind="zhou")


def hgnn_star_laplacian(hypergraph: Hypergraph, edvw) -> RealPropagator:
    """EDVW analogue Delta = I - D^{-1/2} R W D_E^{-1} R^T D^{-1/2}.

    ``edvw`` is an EdvwMatrix or a dense/sparse (n, m) array supported on the
    incidence.  With R = Y this is exactly the Zhou Laplacian.
    """
    if isinstance(edvw, EdvwMatrix):
        r = edvw.values
    else:
        r = sp.csr_matrix(edvw, dtype=float)
    if r.shape != (hypergraph.n_vertices, hypergraph.n_edges):
        raise ValueError("EDVW shape does not match the hypergraph")
    smoothing = _symmetric_core(hypergraph, r)
    laplacian = np.eye(hypergraph.n_vertices) - smoothing
    return RealPropagator(matrix=smoothing, laplacian=laplacian, kind="hgnn_star")


def clique_gcn_propagator(hypergraph: Hypergraph) -> RealPropagator:
    """Renormalized adjacency of the zero-diagonal clique expansion.

    Self-loops are added and the result is symmetrically normalized, the
    standard GCN preprocessing.
    """
    adj = clique_expansion(hypergraph) + np.eye(hypergraph.n_vertices)
    inv_sqrt = 1.0 / np.sqrt(adj.sum(axis=1))
    matrix = adj * inv_sqrt[:, None] * inv_sqrt[None, :]
    return RealPropagator(matrix=(matrix + matrix.T) / 2.0, laplacian=None, kind="clique_gcn")


@dataclass
class RealModelState:
    """Real GCN parameters and optimizer moments."""

    w_self: list[np.ndarray]
    w_neigh: list[np.ndarray]
    biases: list[np.ndarray]
    w_head: np.ndarray
    matrix: np.ndarray
    config: ModelConfig
    adam_m: dict[str, np.ndarray] = field(default_factory=dict)
    adam_v: dict[str, np.ndarray] = field(default_factory=dict)
    adam_t: int = 0
    epoch: int = 0

    def named_parameters(self) -> dict[str, np.ndarray]:
        params = {}
        for l, (ws, wn, b) in enumerate(zip(self.w_self, self.w_neigh, self.biases)):
            params[f"w_self/{l}"] = ws
            params[f"w_neigh/{l}"] = wn
            params[f"bias/{l}"] = b
        params["w_head"] = self.w_head
        return params


def init_real_state(config: ModelConfig, n_features: int,
                    propagator: RealPropagator) -> RealModelState:
    """Seeded init mirroring the complex network's draw order; real-width head."""
    rng = np.random.default_rng(config.seed)
    widths = (n_features,) + config.layer_widths()
    w_self, w_neigh, biases = [], [], []
    for l in range(config.n_layers):
        w_self.append(_glorot(rng, widths[l], widths[l + 1]))
        w_neigh.append(_glorot(rng, widths[l], widths[l + 1]))
        biases.append(np.zeros(widths[l + 1]))
    w_head = _glorot(rng, widths[-1], config.n_classes)
    state = RealModelState(w_self=w_self, w_neigh=w_neigh, biases=biases,
                           w_head=w_head, matrix=propagator.matrix, config=config)
    for name, param in state.named_parameters().items():
        state.adam_m[name] = np.zeros_like(param)
        state.adam_v[name] = np.zeros_like(param)
    return state


def real_forward(state: RealModelState, features: np.ndarray):
    """ReLU GCN layers X -> relu(X W_self + A X W_neigh + B), then a linear head."""
    x = np.asarray(features, dtype=float)
    xs, ns, masks = [x], [], []
    for l in range(len(state.w_self)):
        n = state.matrix @ x
        z = x @ state.w_self[l] + n @ state.w_neigh[l] + state.biases[l]
        if not np.all(np.isfinite(z)):
            raise RuntimeError(f"non-finite activation in layer {l}")
        mask = z > 0
        x = z * mask
        xs.append(x)
        ns.append(n)
        masks.append(mask)
    logits = x @ state.w_head
    return logits, (xs, ns, masks)


def _real_backward(state, caches, logits, labels, train_mask, weight_decay):
    xs, ns, masks = caches
    n_train = int(train_mask.sum())
    probs = np.exp(_log_softmax(logits))
    dlogits = np.zeros_like(logits)
    dlogits[train_mask] = probs[train_mask]
    dlogits[train_mask, labels[train_mask]] -= 1.0
    dlogits /= n_train

    grads = {"w_head": xs[-1].T @ dlogits + weight_decay * state.w_head}
    g = dlogits @ state.w_head.T
    for l in reversed(range(len(state.w_self))):
        g_pre = g * masks[l]
        grads[f"bias/{l}"] = g_pre.sum(axis=0)
        grads[f"w_self/{l}"] = xs[l].T @ g_pre + weight_decay * state.w_self[l]
        grads[f"w_neigh/{l}"] = ns[l].T @ g_pre + weight_decay * state.w_neigh[l]
        g = g_pre @ state.w_self[l].T + state.matrix.T @ (g_pre @ state.w_neigh[l].T)
    return grads


def _adam_step(state, grads) -> None:
    state.adam_t += 1
    t = state.adam_t
    lr = state.config.learning_rate
    for name, param in state.named_parameters().items():
        g = grads[name]
        m = state.adam_m[name]
        v = state.adam_v[name]
        m *= ADAM_BETA1
        m += (1 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1 - ADAM_BETA2) * (g * g)
        m_hat = m / (1 - ADAM_BETA1 ** t)
        v_hat = v / (1 - ADAM_BETA2 ** t)
        param -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


def train_real_gcn(propagator: RealPropagator, features, labels, config: ModelConfig,
                   train_mask=None, test_mask=None):
    """Train the real GCN; same optimizer, loss, and split machinery as the
    complex network.  Returns (state, history of (epoch, loss, test accuracy))."""
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    state = init_real_state(config, features.shape[1], propagator)
    if train_mask is None or test_mask is None:
        rng = np.random.default_rng(config.seed)
        split = make_split(labels, config.train_fraction, rng)
        train_mask = split.train if train_mask is None else train_mask
        test_mask = split.test if test_mask is None else test_mask
    train_mask = np.asarray(train_mask, dtype=bool)
    test_mask = np.asarray(test_mask, dtype=bool)

    history = []
    for epoch in range(config.epochs):
        logits, caches = real_forward(state, features)
        if not train_mask.any():
            raise ValueError("training mask is empty")
        rows = _log_softmax(logits[train_mask])
        value = -float(rows[np.arange(rows.shape[0]), labels[train_mask]].mean())
        if config.weight_decay:
            for w in [*state.w_self, *state.w_neigh, state.w_head]:
                value += 0.5 * config.weight_decay * float((w * w).sum())
        if not np.isfinite(value):
            raise RuntimeError(f"training diverged: non-finite loss at epoch {epoch}")
        test_acc = _accuracy(logits, labels, test_mask)
        history.append((epoch, value, test_acc))
        grads = _real_backward(state, caches, logits, labels, train_mask,
                               config.weight_decay)
        _adam_step(state, grads)
        state.epoch = epoch + 1
    return state, history


def evaluate_real(state: RealModelState, features, labels, mask) -> float:
    logits, _ = real_forward(state, features)
    return _accuracy(logits, labels, mask)


def spectral_clustering_majority(adjacency, k: int, labels, train_mask,
                                 seed: int = 0, n_restarts: int = 50):
    """Cluster on the bottom-k eigenvectors of the symmetric normalized
    Laplacian, then label each cluster by the majority training label.

    Rows of the eigenvector matrix are normalized to unit length before
    k-means++ with ``n_restarts`` seeded restarts.  Clusters holding no
    training vertex fall back to the global majority training label.  Returns
    (predicted labels, accuracy over labeled non-training vertices).
    """
    adjacency = np.asarray(adjacency, dtype=float)
    n = adjacency.shape[0]
    if adjacency.shape != (n, n):
        raise ValueError("adjacency must be square")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    labels = np.asarray(labels)
    train_mask = np.asarray(train_mask, dtype=bool)

    degrees = adjacency.sum(axis=1)
    inv_sqrt = np.zeros(n)
    positive = degrees > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degrees[positive])
    laplacian = np.eye(n) - adjacency * inv_sqrt[:, None] * inv_sqrt[None, :]
    laplacian = (laplacian + laplacian.T) / 2.0
    _, vectors = scipy.linalg.eigh(laplacian)
    embedding = vectors[:, :k]
    norms = np.linalg.norm(embedding, axis=1)
    embedding = embedding / np.where(norms > 0, norms, 1.0)[:, None]

    km = KMeans(n_clusters=k, init="k-means++", n_init=n_restarts, random_state=seed)
    clusters = km.fit_predict(embedding)

    train_labels = labels[train_mask]
    if train_labels.size == 0:
        raise ValueError("no training labels to vote with")
    global_majority = int(np.bincount(train_labels).argmax())
    predicted = np.full(n, global_majority)
    for c in range(k):
        members = clusters == c
        votes = labels[members & train_mask]
        if votes.size:
            predicted[members] = int(np.bincount(votes).argmax())

    eval_mask = (~train_mask) & (labels >= 0)
    if not eval_mask.any():
        raise ValueError("no labeled vertices outside the training mask")
    accuracy = float((predicted[eval_mask] == labels[eval_mask]).mean())
    return predicted, accuracy
