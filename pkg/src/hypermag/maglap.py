"""Magnetic Laplacians of (possibly non-symmetric) transition matrices.

The symmetrized matrix P_s = (P + P^T)/2 carries magnitudes; the walk's
asymmetry moves into a phase matrix Theta = 2*pi*q*(P - P^T) for a scalar
charge q, or 2*pi*Q*(P - P^T) entrywise for a symmetric charge matrix Q.
The Hermitian adjacency is H = P_s * exp(i Theta), and the Laplacians

    normalized:    L = I - D_s^{-1/2} P_s D_s^{-1/2} * exp(i Theta)
    unnormalized:  L = D_s - H

are Hermitian positive semidefinite.  The renormalized form
(2/lambda_max) L - I has spectrum in [-1, 1].  ``PropagationOperator`` is the
self-loop variant D~^{-1/2} (P_s + I) D~^{-1/2} * exp(i Theta) consumed by the
network; it exposes the dependence of the operator on the charge so training
can differentiate through it.

Dense storage throughout; intended for operators up to a few thousand
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "ChargeParams",
    "MagneticLaplacian",
    "PropagationOperator",
    "symmetrize",
    "phase_matrix",
    "hermitian_adjacency",
    "magnetic_laplacian",
    "spectral_decomposition",
    "fourier_transform",
    "inverse_fourier",
    "convolve",
    "propagation_operator",
]

HERMITIAN_TOL = 1e-12
_DENSE_EIG_LIMIT = 2048


@dataclass(frozen=True)
class ChargeParams:
    """Charge of the phase matrix: one scalar q, or one value per vertex pair.

    Matrix mode stores a parameter for each unordered supported pair {u, v}
    (u < v) and mirrors it across the diagonal, so the dense charge matrix is
    symmetric by construction.
    """

    q: float | None = None
    pairs: np.ndarray | None = None
    values: np.ndarray | None = None
    n: int | None = None

    def __post_init__(self):
        if (self.q is None) == (self.pairs is None):
            raise ValueError("charge is either a scalar q or per-pair values, not both")
        if self.q is not None:
            if self.q < 0:
                raise ValueError("scalar charge must be nonnegative")
        else:
            pairs = np.asarray(self.pairs, dtype=int)
            values = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "pairs", pairs)
            object.__setattr__(self, "values", values)
            if pairs.ndim != 2 or pairs.shape[1] != 2:
                raise ValueError("pairs must be a (k, 2) index array")
            if values.shape != (pairs.shape[0],):
                raise ValueError("values must align with pairs")
            if self.n is None:
                raise ValueError("matrix charge requires the vertex count n")
            if pairs.size and (pairs.min() < 0 or pairs.max() >= self.n):
                raise ValueError("pair indices outside [0, n)")
            if np.any(pairs[:, 0] >= pairs[:, 1]):
                raise ValueError("pairs must satisfy u < v")

    @classmethod
    def scalar(cls, q: float) -> "ChargeParams":
        return cls(q=float(q))

    @classmethod
    def matrix(cls, pairs, values, n: int) -> "ChargeParams":
        return cls(pairs=pairs, values=values, n=n)

    @classmethod
    def from_dense(cls, q_matrix: np.ndarray, support: np.ndarray) -> "ChargeParams":
        """Per-pair parameters from a symmetric dense Q restricted to a support mask."""
        q_matrix = np.asarray(q_matrix, dtype=float)
        if q_matrix.ndim != 2 or q_matrix.shape[0] != q_matrix.shape[1]:
            raise ValueError("charge matrix must be square")
        if not np.array_equal(q_matrix, q_matrix.T):
            raise ValueError("charge matrix must be symmetric")
        upper = np.triu(np.asarray(support, dtype=bool), k=1)
        u, v = np.nonzero(upper)
        return cls(pairs=np.column_stack([u, v]), values=q_matrix[u, v], n=q_matrix.shape[0])

    @property
    def is_scalar(self) -> bool:
        return self.q is not None

    def dense_matrix(self) -> np.ndarray:
        if self.is_scalar:
            raise ValueError("scalar charge has no dense matrix")
        q = np.zeros((self.n, self.n))
        u, v = self.pairs[:, 0], self.pairs[:, 1]
        q[u, v] = self.values
        q[v, u] = self.values
        return q


def _as_charge(charge, p: np.ndarray) -> ChargeParams:
    if isinstance(charge, ChargeParams):
        return charge
    if np.isscalar(charge):
        return ChargeParams.scalar(float(charge))
    q_matrix = np.asarray(charge, dtype=float)
    p_s = (p + p.T) / 2.0
    return ChargeParams.from_dense(q_matrix, p_s != 0)


def symmetrize(p) -> tuple[np.ndarray, np.ndarray]:
    """(P_s, degree vector) with P_s = (P + P^T)/2; rejects isolated vertices."""
    values = p.values if hasattr(p, "values") and not isinstance(p, np.ndarray) else p
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("P must be square")
    p_s = (values + values.T) / 2.0
    degrees = p_s.sum(axis=1)
    if np.any(degrees == 0):
        v = int(np.argmin(degrees))
        raise ValueError(f"vertex {v} is isolated after symmetrization")
    return p_s, degrees


def phase_matrix(p, charge) -> np.ndarray:
    """Skew-symmetric phase Theta from the walk asymmetry and the charge.

    Scalar charge: Theta = 2*pi*q*(P - P^T).  Matrix charge: the same with an
    entrywise symmetric Q in place of q; the charge support must lie inside
    the support of P_s.
    """
    values = p.values if hasattr(p, "values") and not isinstance(p, np.ndarray) else p
    values = np.asarray(values, dtype=float)
    skew = values - values.T
    params = _as_charge(charge, values)
    if params.is_scalar:
        return 2.0 * np.pi * params.q * skew
    if params.n != values.shape[0]:
        raise ValueError("charge matrix size does not match P")
    p_s = (values + values.T) / 2.0
    u, v = params.pairs[:, 0], params.pairs[:, 1]
    if np.any(p_s[u, v] == 0):
        raise ValueError("charge support extends outside the support of P_s")
    theta = np.zeros_like(values)
    upper = 2.0 * np.pi * params.values * skew[u, v]
    theta[u, v] = upper
    theta[v, u] = -upper
    return theta


def hermitian_adjacency(p, charge) -> np.ndarray:
    """H = P_s * exp(i Theta); Hermitian with |H| = P_s entrywise."""
    p_s, _ = symmetrize(p)
    theta = phase_matrix(p, charge)
    return p_s * np.exp(1j * theta)


@dataclass(frozen=True)
class MagneticLaplacian:
    """A magnetic Laplacian with the pieces it was assembled from."""

    laplacian: np.ndarray
    symmetrized: np.ndarray
    degrees: np.ndarray
    phase: np.ndarray
    form: str
    lambda_max: float | None = None
    renormalized: np.ndarray | None = None


def _largest_eigenvalue(matrix: np.ndarray, tol: float = 1e-9) -> float:
    n = matrix.shape[0]
    if n <= _DENSE_EIG_LIMIT:
        return float(np.linalg.eigvalsh(matrix)[-1])
    from scipy.sparse.linalg import ArpackNoConvergence, eigsh

    try:
        value = eigsh(matrix, k=1, which="LA", tol=tol, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise RuntimeError("largest-eigenvalue solve did not converge") from exc
    return float(value[0])


def magnetic_laplacian(p, charge, form: str = "normalized",
                       renormalize: bool = False) -> MagneticLaplacian:
    """Hermitian PSD Laplacian of a walk under a charge.

    ``form`` is "normalized" (I - D_s^{-1/2} P_s D_s^{-1/2} * exp(i Theta)) or
    "unnormalized" (D_s - H).  With ``renormalize`` the spectrum is mapped to
    [-1, 1] via (2/lambda_max) L - I, and ``lambda_max`` is recorded.
    """
    if form not in ("normalized", "unnormalized"):
        raise ValueError("form must be 'normalized' or 'unnormalized'")
    p_s, degrees = symmetrize(p)
    theta = phase_matrix(p, charge)
    if form == "normalized":
        inv_sqrt = 1.0 / np.sqrt(degrees)
        scaled = p_s * inv_sqrt[:, None] * inv_sqrt[None, :]
        laplacian = -(scaled * np.exp(1j * theta))
        laplacian[np.diag_indices_from(laplacian)] += 1.0
    else:
        laplacian = np.diag(degrees).astype(complex) - p_s * np.exp(1j * theta)
    lam_max = None
    renormalized = None
    if renormalize:
        lam_max = _largest_eigenvalue(laplacian)
        renormalized = (2.0 / lam_max) * laplacian - np.eye(laplacian.shape[0])
    return MagneticLaplacian(
        laplacian=laplacian,
        symmetrized=p_s,
        degrees=degrees,
        phase=theta,
        form=form,
        lambda_max=lam_max,
        renormalized=renormalized,
    )


def _as_square_matrix(operator) -> np.ndarray:
    if isinstance(operator, MagneticLaplacian):
        matrix = operator.laplacian
    else:
        matrix = np.asarray(operator)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("operator must be a square matrix")
    return matrix


def spectral_decomposition(operator) -> tuple[np.ndarray, np.ndarray]:
    """(Phi, lambda) with eigenvalues ascending and unitary eigenvectors."""
    matrix = _as_square_matrix(operator)
    if np.abs(matrix - matrix.conj().T).max() > HERMITIAN_TOL:
        raise ValueError("operator is not Hermitian")
    eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
    return eigenvectors, eigenvalues


def fourier_transform(x, basis: np.ndarray) -> np.ndarray:
    """Coefficients of x in the eigenbasis: x_hat = Phi^* x."""
    return basis.conj().T @ np.asarray(x)


def inverse_fourier(x_hat, basis: np.ndarray) -> np.ndarray:
    """Signal from eigenbasis coefficients: x = Phi x_hat."""
    return basis @ np.asarray(x_hat)


def convolve(y, x, basis: np.ndarray) -> np.ndarray:
    """Graph convolution y * x = Phi Diag(Phi^* y) Phi^* x.

    Built as an explicit operator product so the convolution-theorem identity
    (pointwise multiplication of spectra) remains an independent check.
    """
    y_hat = fourier_transform(y, basis)
    operator = (basis * y_hat[None, :]) @ basis.conj().T
    return operator @ np.asarray(x)


@dataclass(frozen=True)
class PropagationOperator:
    """Charge-differentiable network operator D~^{-1/2}(P_s + I)D~^{-1/2} e^{i Theta}.

    ``magnitude`` is the real self-looped normalized matrix, ``coeff`` is
    2*pi*(P - P^T) so that Theta = coeff * Q entrywise, and ``pairs`` lists
    the unordered supported off-diagonal pairs of P_s that a matrix charge
    parameterizes.
    """

    magnitude: np.ndarray
    coeff: np.ndarray
    pairs: np.ndarray
    n: int

    @classmethod
    def from_transition(cls, p) -> "PropagationOperator":
        p_s, _ = symmetrize(p)
        values = p.values if hasattr(p, "values") and not isinstance(p, np.ndarray) else p
        values = np.asarray(values, dtype=float)
        looped = p_s + np.eye(p_s.shape[0])
        degrees = looped.sum(axis=1)
        inv_sqrt = 1.0 / np.sqrt(degrees)
        magnitude = looped * inv_sqrt[:, None] * inv_sqrt[None, :]
        coeff = 2.0 * np.pi * (values - values.T)
        u, v = np.nonzero(np.triu(p_s, k=1))
        return cls(magnitude=magnitude, coeff=coeff,
                   pairs=np.column_stack([u, v]), n=p_s.shape[0])

    def theta(self, charge) -> np.ndarray:
        """Phase matrix for a scalar charge or per-pair values aligned to ``pairs``."""
        if np.isscalar(charge):
            if charge < 0:
                raise ValueError("scalar charge must be nonnegative")
            return float(charge) * self.coeff
        values = np.asarray(charge, dtype=float)
        if values.shape != (self.pairs.shape[0],):
            raise ValueError("per-pair charge values must align with the support pairs")
        theta = np.zeros((self.n, self.n))
        u, v = self.pairs[:, 0], self.pairs[:, 1]
        upper = values * self.coeff[u, v]
        theta[u, v] = upper
        theta[v, u] = -upper
        return theta

    def build(self, charge) -> np.ndarray:
        """Complex propagation matrix at the given charge."""
        return self.magnitude * np.exp(1j * self.theta(charge))


def propagation_operator(p, charge) -> np.ndarray:
    """Complex propagation matrix used by network layers (see PropagationOperator)."""
    operator = PropagationOperator.from_transition(p)
    params = _as_charge(charge, np.asarray(
        p.values if hasattr(p, "values") and not isinstance(p, np.ndarray) else p, dtype=float))
    if params.is_scalar:
        return operator.build(params.q)
    dense = params.dense_matrix()
    u, v = operator.pairs[:, 0], operator.pairs[:, 1]
    return operator.build(dense[u, v])
