"""Random walks on hypergraphs and Markov-chain diagnostics.

Three walk constructions share the two-step structure "pick an incident
hyperedge proportional to its weight, then pick a vertex inside it":

- ``zhou_transition``: vertices drawn uniformly inside the edge; always
  reversible.
- ``edvw_transition``: vertices drawn proportional to edge-dependent vertex
  weights; generally non-reversible.  Requires a normalized EDVW so the
  result is row-stochastic.
- ``unified_transition``: P = rownorm(Q1 W rho(D_E) Q2^T), which recovers the
  walks above for specific (Q1, Q2, rho) and is reversible when Q1 = k Q2.

Diagnostics: stationary distribution (power iteration with a dense fallback),
detailed-balance residual, hitting times, and the representative digraph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .hypergraph import EdvwMatrix, Hypergraph

__all__ = [
    "TransitionMatrix",
    "StationaryDistribution",
    "ConvergenceError",
    "zhou_transition",
    "edvw_transition",
    "unified_transition",
    "stationary_distribution",
    "is_reversible",
    "hitting_times",
    "representative_digraph",
]

ROW_SUM_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix of a vertex-level random walk."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        p = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("transition matrix must be square")
        if p.min() < 0:
            raise ValueError("transition probabilities must be nonnegative")
        row_err = np.abs(p.sum(axis=1) - 1.0)
        if row_err.max() > ROW_SUM_TOL:
            v = int(np.argmax(row_err))
            raise ValueError(f"row {v} sums to 1 only within {row_err[v]:.3e}")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary row vector pi with its residual ||pi P - pi||_1."""

    values: np.ndarray
    residual: float
    used_lazy: bool = False
    method: str = "power"


def _two_step_transition(hypergraph: Hypergraph, right, kind: str) -> TransitionMatrix:
    """P = D_V^{-1} Y W D_E^{-1} right^T for a vertex-selection matrix ``right``."""
    d = hypergraph.vertex_degrees()
    if np.any(d == 0):
        v = int(np.argmin(d))
        raise ValueError(f"vertex {v} belongs to no hyperedge")
    w_over_delta = hypergraph.edge_weights / hypergraph.edge_degrees()
    left = hypergraph.incidence() @ sp.diags(w_over_delta)
    p = (left @ right.T).toarray()
    p /= d[:, None]
    return TransitionMatrix(values=p, kind=kind)


def zhou_transition(hypergraph: Hypergraph) -> TransitionMatrix:
    """Edge-weighted walk with uniform vertex selection inside each edge."""
    return _two_step_transition(hypergraph, hypergraph.incidence(), "zhou")


def edvw_transition(hypergraph: Hypergraph, edvw: EdvwMatrix) -> TransitionMatrix:
    """Walk whose in-edge vertex selection follows edge-dependent vertex weights."""
    if not isinstance(edvw, EdvwMatrix):
        raise ValueError("edvw must be an EdvwMatrix")
    if not edvw.normalized:
        raise ValueError("EDVW matrix is not normalized; call normalize() first")
    edvw.check_support(hypergraph)
    return _two_step_transition(hypergraph, edvw.values, "edvw")


def _as_vertex_edge_matrix(obj, hypergraph: Hypergraph, name: str) -> sp.csr_matrix:
    if isinstance(obj, EdvwMatrix):
        mat = obj.values
    else:
        mat = sp.csr_matrix(obj, dtype=float)
    if mat.shape != (hypergraph.n_vertices, hypergraph.n_edges):
        raise ValueError(
            f"{name} has shape {mat.shape}, expected "
            f"({hypergraph.n_vertices}, {hypergraph.n_edges})"
        )
    if mat.nnz and mat.data.min() < 0:
        raise ValueError(f"{name} must be nonnegative")
    pattern = mat.copy()
    pattern.data = np.ones_like(pattern.data)
    outside = pattern - pattern.multiply(hypergraph.incidence())
    if outside.count_nonzero():
        raise ValueError(f"{name} has support outside the incidence structure")
    return mat


def unified_transition(hypergraph: Hypergraph, q1, q2, rho: str = "inverse") -> TransitionMatrix:
    """Row-normalized P from Q1 W rho(D_E) Q2^T.

    ``rho`` is "inverse" (scale each edge by 1/delta(e)) or "identity" (scale
    by delta(e)).  With Q1 = Y, Q2 a normalized EDVW, rho = "inverse" this is
    the EDVW walk; with Q1 = k Q2 the walk is reversible for any rho.
    """
    if rho not in ("inverse", "identity"):
        raise ValueError("rho must be 'inverse' or 'identity'")
    q1 = _as_vertex_edge_matrix(q1, hypergraph, "Q1")
    q2 = _as_vertex_edge_matrix(q2, hypergraph, "Q2")
    delta = hypergraph.edge_degrees()
    edge_scale = hypergraph.edge_weights * (1.0 / delta if rho == "inverse" else delta)
    product = ((q1 @ sp.diags(edge_scale)) @ q2.T).toarray()
    row_sums = product.sum(axis=1)
    if np.any(row_sums <= 0):
        v = int(np.argmin(row_sums))
        raise ValueError(f"vertex {v} has no outgoing mass under (Q1, Q2)")
    return TransitionMatrix(values=product / row_sums[:, None], kind="unified")


def _transition_values(p) -> np.ndarray:
    if isinstance(p, TransitionMatrix):
        return p.values
    return TransitionMatrix(values=np.asarray(p, dtype=float), kind="raw").values


def _require_irreducible(values: np.ndarray) -> None:
    graph = sp.csr_matrix(values > 0)
    n_components, _ = connected_components(graph, directed=True, connection="strong")
    if n_components != 1:
        raise ValueError(
            f"chain is reducible ({n_components} strongly connected components)"
        )


def stationary_distribution(p, tol: float = 1e-12, max_iter: int = 100_000,
                            lazy: bool = False) -> StationaryDistribution:
    """Stationary distribution of an irreducible chain.

    Power iteration on P (or on the lazy chain (P + I)/2 when ``lazy``, which
    shares the stationary vector and converges for periodic chains).  For
    chains with at most 200 states, a dense linear solve is the fallback when
    iteration stalls; larger non-convergent problems raise ConvergenceError.
    """
    values = _transition_values(p)
    _require_irreducible(values)
    n = values.shape[0]
    iterate = (values + np.eye(n)) / 2.0 if lazy else values

    x = np.full(n, 1.0 / n)
    converged = False
    for _ in range(max_iter):
        x_next = x @ iterate
        if np.abs(x_next - x).sum() <= tol:
            x = x_next
            converged = True
            break
        x = x_next
    method = "power"

    if not converged:
        if n <= 200:
            a = np.vstack([values.T - np.eye(n), np.ones((1, n))])
            b = np.zeros(n + 1)
            b[-1] = 1.0
            x, *_ = np.linalg.lstsq(a, b, rcond=None)
            x = np.maximum(x, 0.0)
            x /= x.sum()
            method = "dense"
        else:
            residual = float(np.abs(x @ values - x).sum())
            raise ConvergenceError("power iteration did not converge", residual)

    x = x / x.sum()
    residual = float(np.abs(x @ values - x).sum())
    if residual > max(tol, 1e-10):
        raise ConvergenceError("stationary solve exceeded tolerance", residual)
    return StationaryDistribution(values=x, residual=residual, used_lazy=lazy, method=method)


def is_reversible(p, pi=None, tol: float = 1e-10) -> tuple[bool, float]:
    """Detailed-balance check; returns (verdict, max |pi_i P_ij - pi_j P_ji|)."""
    values = _transition_values(p)
    if pi is None:
        pi = stationary_distribution(values).values
    elif isinstance(pi, StationaryDistribution):
        pi = pi.values
    flow = pi[:, None] * values
    residual = float(np.abs(flow - flow.T).max())
    return residual <= tol, residual


def hitting_times(p) -> np.ndarray:
    """Expected steps h(u, v) to first reach v from u; h(v, v) = 0.

    Solves, for each target v, the linear system h = 1 + P_{-v} h over the
    remaining states.  Requires an irreducible chain.
    """
    values = _transition_values(p)
    _require_irreducible(values)
    n = values.shape[0]
    h = np.zeros((n, n))
    for v in range(n):
        keep = np.arange(n) != v
        a = np.eye(n - 1) - values[np.ix_(keep, keep)]
        try:
            h[keep, v] = np.linalg.solve(a, np.ones(n - 1))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"hitting-time system for target {v} is singular") from exc
    return h


def representative_digraph(p) -> list[tuple[int, int, float]]:
    """Weighted edge list (u, v, P_uv) over positive entries, row-major order."""
    values = _transition_values(p)
    rows, cols = np.nonzero(values)
    return [(int(u), int(v), float(values[u, v])) for u, v in zip(rows, cols)]
