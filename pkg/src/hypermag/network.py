"""Complex-valued convolutional network over a magnetic propagation operator.

Layers compute X^(l) = sigma(X^(l-1) W_self + A X^(l-1) W_neigh + B) where A
is the charge-dependent complex propagation operator, the weights and biases
are real (biases enter the real part), and sigma keeps an entry z exactly when
Arg(z) lies in [-pi/2, pi/2).  The last layer is unwound into [Re | Im] and a
real head produces class logits trained with softmax cross-entropy plus L2
weight decay on the weight matrices (not biases, not the charge).

Forward and backward passes are written out explicitly; the backward pass
differentiates through the propagation operator into the charge matrix, whose
entries scale phases as Theta_uv = 2*pi*Q_uv*(P_uv - P_vu).  Gradients are
exact away from activation boundaries and are checked against central finite
differences in the test suite.  All randomness flows through seeded
generators, so training is deterministic.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import EdvwMatrix, Hypergraph
from .maglap import PropagationOperator
from .walks import TransitionMatrix, edvw_transition, zhou_transition

__all__ = [
    "ModelConfig",
    "ModelState",
    "SplitMask",
    "Caches",
    "complex_relu",
    "init_state",
    "forward",
    "loss",
    "backward",
    "adam_step",
    "make_split",
    "train",
    "evaluate",
]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and training hyperparameters.

    ``hidden_dims`` is a width shared by all layers or a per-layer tuple.
    ``charge_mode`` selects a fixed scalar charge ("scalar", value
    ``charge_init``) or a learnable symmetric charge matrix ("matrix",
    initialized to ``charge_init`` on every supported pair).
    """

    n_classes: int
    n_layers: int = 2
    hidden_dims: int | tuple[int, ...] = 64
    learning_rate: float = 0.01
    weight_decay: float = 0.01
    epochs: int = 400
    seed: int = 0
    charge_mode: str = "matrix"
    charge_init: float = 0.25
    train_fraction: float = 0.8

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if self.n_layers < 1:
            raise ValueError("need at least one layer")
        dims = self.layer_widths()
        if any(d < 1 for d in dims):
            raise ValueError("layer widths must be positive")
        if self.learning_rate <= 0 or self.weight_decay < 0 or self.epochs < 1:
            raise ValueError("invalid training hyperparameters")
        if self.charge_mode not in ("scalar", "matrix"):
            raise ValueError("charge_mode must be 'scalar' or 'matrix'")
        if self.charge_mode == "scalar" and self.charge_init < 0:
            raise ValueError("scalar charge must be nonnegative")
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie in (0, 1)")

    def layer_widths(self) -> tuple[int, ...]:
        if isinstance(self.hidden_dims, (int, np.integer)):
            return (int(self.hidden_dims),) * self.n_layers
        dims = tuple(int(d) for d in self.hidden_dims)
        if len(dims) != self.n_layers:
            raise ValueError("hidden_dims must provide one width per layer")
        return dims


@dataclass
class ModelState:
    """Parameters, optimizer moments, and the operator the model runs on."""

    w_self: list[np.ndarray]
    w_neigh: list[np.ndarray]
    biases: list[np.ndarray]
    w_head: np.ndarray
    charge_mode: str
    charge_q: float
    charge_values: np.ndarray | None
    prop: PropagationOperator
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
        if self.charge_mode == "matrix":
            params["charge"] = self.charge_values
        return params

    def charge(self):
        """Argument for PropagationOperator.build in the current mode."""
        return self.charge_q if self.charge_mode == "scalar" else self.charge_values


@dataclass(frozen=True)
class SplitMask:
    """Disjoint boolean train/test masks covering the labeled vertices."""

    train: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        train = np.asarray(self.train, dtype=bool)
        test = np.asarray(self.test, dtype=bool)
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)
        if train.shape != test.shape:
            raise ValueError("train and test masks must have equal shape")
        if np.any(train & test):
            raise ValueError("train and test masks overlap")


@dataclass
class Caches:
    """Forward intermediates needed by the backward pass."""

    a: np.ndarray
    xs: list[np.ndarray]
    ns: list[np.ndarray]
    masks: list[np.ndarray]
    xhat: np.ndarray
    logits: np.ndarray
    state: ModelState


def _keep_mask(z: np.ndarray) -> np.ndarray:
    # Arg(z) in [-pi/2, pi/2): right half-plane, plus the negative imaginary axis.
    return (z.real > 0) | ((z.real == 0) & (z.imag < 0))


def complex_relu(z: np.ndarray) -> np.ndarray:
    """Keep entries whose argument lies in [-pi/2, pi/2); zero the rest.

    The boundary is taken literally: i is zeroed, -i is kept, 0 maps to 0.
    On real inputs this reduces to the ordinary ReLU.
    """
    z = np.asarray(z)
    return z * _keep_mask(z)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_state(config: ModelConfig, n_features: int, prop: PropagationOperator) -> ModelState:
    """Seeded Glorot-uniform weights, zero biases, constant charge init."""
    rng = np.random.default_rng(config.seed)
    widths = (n_features,) + config.layer_widths()
    w_self, w_neigh, biases = [], [], []
    for l in range(config.n_layers):
        w_self.append(_glorot(rng, widths[l], widths[l + 1]))
        w_neigh.append(_glorot(rng, widths[l], widths[l + 1]))
        biases.append(np.zeros(widths[l + 1]))
    w_head = _glorot(rng, 2 * widths[-1], config.n_classes)
    charge_values = None
    if config.charge_mode == "matrix":
        charge_values = np.full(prop.pairs.shape[0], config.charge_init)
    state = ModelState(
        w_self=w_self,
        w_neigh=w_neigh,
        biases=biases,
        w_head=w_head,
        charge_mode=config.charge_mode,
        charge_q=config.charge_init,
        charge_values=charge_values,
        prop=prop,
        config=config,
    )
    for name, param in state.named_parameters().items():
        state.adam_m[name] = np.zeros_like(param)
        state.adam_v[name] = np.zeros_like(param)
    return state


def forward(state: ModelState, features: np.ndarray,
            prop: PropagationOperator | None = None) -> tuple[np.ndarray, Caches]:
    """Full-batch forward pass; returns class logits and backward caches."""
    prop = state.prop if prop is None else prop
    a = prop.build(state.charge())
    x = np.asarray(features, dtype=float).astype(complex)
    if x.shape[0] != a.shape[0]:
        raise ValueError("feature rows must match the operator size")
    xs, ns, masks = [x], [], []
    for l in range(len(state.w_self)):
        n = a @ x
        z = x @ state.w_self[l] + n @ state.w_neigh[l] + state.biases[l]
        if not np.all(np.isfinite(z)):
            raise RuntimeError(f"non-finite activation in layer {l}")
        mask = _keep_mask(z)
        x = z * mask
        xs.append(x)
        ns.append(n)
        masks.append(mask)
    xhat = np.concatenate([x.real, x.imag], axis=1)
    logits = xhat @ state.w_head
    return logits, Caches(a=a, xs=xs, ns=ns, masks=masks, xhat=xhat,
                          logits=logits, state=state)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _weight_squares(state) -> float:
    total = 0.0
    for w in [*state.w_self, *state.w_neigh, state.w_head]:
        total += float((w * w).sum())
    return total


def loss(logits: np.ndarray, labels: np.ndarray, train_mask: np.ndarray,
         state: ModelState | None = None, weight_decay: float = 0.0) -> float:
    """Mean cross-entropy over the mask plus (wd/2) * sum ||W||_F^2.

    The decay covers weight matrices only; biases and charge are exempt.
    """
    train_mask = np.asarray(train_mask, dtype=bool)
    if not train_mask.any():
        raise ValueError("training mask is empty")
    rows = _log_softmax(logits[train_mask])
    picked = rows[np.arange(rows.shape[0]), np.asarray(labels)[train_mask]]
    value = -float(picked.mean())
    if weight_decay:
        if state is None:
            raise ValueError("weight decay requires the model state")
        value += 0.5 * weight_decay * _weight_squares(state)
    return value


def backward(caches: Caches, labels: np.ndarray, train_mask: np.ndarray,
             weight_decay: float = 0.0) -> dict[str, np.ndarray]:
    """Exact gradients of ``loss`` for every parameter, including the charge.

    Complex intermediates carry adjoints G = dL/dRe + i dL/dIm.  The charge
    gradient follows from dA_uv/dQ_uv = i * 2*pi*(P_uv - P_vu) * A_uv with the
    two mirrored entries of each unordered pair summed into one parameter.
    """
    state = caches.state
    train_mask = np.asarray(train_mask, dtype=bool)
    labels = np.asarray(labels)
    n_train = int(train_mask.sum())
    if n_train == 0:
        raise ValueError("training mask is empty")

    probs = np.exp(_log_softmax(caches.logits))
    dlogits = np.zeros_like(caches.logits)
    dlogits[train_mask] = probs[train_mask]
    dlogits[train_mask, labels[train_mask]] -= 1.0
    dlogits /= n_train

    grads: dict[str, np.ndarray] = {}
    grads["w_head"] = caches.xhat.T @ dlogits + weight_decay * state.w_head
    dxhat = dlogits @ state.w_head.T
    f_last = caches.xs[-1].shape[1]
    g = dxhat[:, :f_last] + 1j * dxhat[:, f_last:]

    a_conj_t = caches.a.conj().T
    g_a = np.zeros_like(caches.a)
    for l in reversed(range(len(state.w_self))):
        g_pre = g * caches.masks[l]
        grads[f"bias/{l}"] = g_pre.real.sum(axis=0)
        grads[f"w_self/{l}"] = (caches.xs[l].conj().T @ g_pre).real \
            + weight_decay * state.w_self[l]
        grads[f"w_neigh/{l}"] = (caches.ns[l].conj().T @ g_pre).real \
            + weight_decay * state.w_neigh[l]
        g_n = g_pre @ state.w_neigh[l].T
        g_a += g_n @ caches.xs[l].conj().T
        g = g_pre @ state.w_self[l].T + a_conj_t @ g_n

    if state.charge_mode == "matrix":
        d_theta = (np.conj(g_a) * (1j * caches.a)).real
        d_q = state.prop.coeff * d_theta
        u, v = state.prop.pairs[:, 0], state.prop.pairs[:, 1]
        grads["charge"] = d_q[u, v] + d_q[v, u]
    return grads


def adam_step(state: ModelState, grads: dict[str, np.ndarray]) -> None:
    """Standard Adam update (beta1=0.9, beta2=0.999, eps=1e-8), in place."""
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


def make_split(labels: np.ndarray, fraction: float = 0.8, rng=None) -> SplitMask:
    """Random train/test split of the labeled vertices (labels >= 0)."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    labeled = np.flatnonzero(labels >= 0)
    if labeled.size < 2:
        raise ValueError("need at least two labeled vertices to split")
    order = rng.permutation(labeled)
    n_train = int(round(fraction * labeled.size))
    n_train = min(max(n_train, 1), labeled.size - 1)
    train = np.zeros(labels.shape[0], dtype=bool)
    test = np.zeros(labels.shape[0], dtype=bool)
    train[order[:n_train]] = True
    test[order[n_train:]] = True
    return SplitMask(train=train, test=test)


def _resolve_transition(data, edvw) -> TransitionMatrix:
    if isinstance(data, Hypergraph):
        if edvw is None:
            return zhou_transition(data)
        if not isinstance(edvw, EdvwMatrix):
            raise ValueError("edvw must be an EdvwMatrix or None")
        if not edvw.normalized:
            edvw = edvw.normalize(data)
        return edvw_transition(data, edvw)
    if isinstance(data, TransitionMatrix):
        return data
    return TransitionMatrix(values=np.asarray(data, dtype=float), kind="raw")


def train(data, edvw, features, labels, config: ModelConfig,
          train_mask=None, test_mask=None) -> tuple[ModelState, list[tuple[int, float, float]]]:
    """Train on a hypergraph (with optional EDVW) or directly on a walk.

    Runs full-batch epochs of forward / backward / Adam.  Returns the trained
    state and a history of (epoch, loss, test accuracy) rows.  A non-finite
    loss aborts with the offending epoch.
    """
    transition = _resolve_transition(data, edvw)
    prop = PropagationOperator.from_transition(transition)
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    state = init_state(config, features.shape[1], prop)
    if train_mask is None or test_mask is None:
        rng = np.random.default_rng(config.seed)
        split = make_split(labels, config.train_fraction, rng)
        train_mask = split.train if train_mask is None else train_mask
        test_mask = split.test if test_mask is None else test_mask
    train_mask = np.asarray(train_mask, dtype=bool)
    test_mask = np.asarray(test_mask, dtype=bool)

    history = []
    for epoch in range(config.epochs):
        logits, caches = forward(state, features)
        value = loss(logits, labels, train_mask, state, config.weight_decay)
        if not np.isfinite(value):
            raise RuntimeError(f"training diverged: non-finite loss at epoch {epoch}")
        test_acc = _accuracy(logits, labels, test_mask)
        history.append((epoch, value, test_acc))
        grads = backward(caches, labels, train_mask, config.weight_decay)
        adam_step(state, grads)
        state.epoch = epoch + 1
    return state, history


def _accuracy(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    mask = np.asarray(mask, dtype=bool) & (np.asarray(labels) >= 0)
    if not mask.any():
        raise ValueError("evaluation mask is empty")
    predictions = logits[mask].argmax(axis=1)
    return float((predictions == np.asarray(labels)[mask]).mean())


def evaluate(state: ModelState, features, labels, mask) -> float:
    """Accuracy of the argmax prediction over the masked labeled vertices."""
    logits, _ = forward(state, np.asarray(features, dtype=float))
    return _accuracy(logits, labels, mask)
