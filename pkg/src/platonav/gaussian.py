"""Multivariate Gaussian primitives shared by the teacher, the learner and their KL coupling."""

import numpy as np
from scipy import linalg

from .errors import ContractViolation, NumericalError

# Eigenvalues below this fraction of the mean eigenvalue are rejected
EIGENVALUE_FLOOR = 1e-10


class Gaussian:
    """
    Immutable multivariate normal N(mean, covariance).

    The covariance is symmetrized on construction and rejected if any
    eigenvalue falls below EIGENVALUE_FLOOR * trace / d.

    Args:
        mean: Vector of length d
        covariance: Symmetric positive-definite d x d matrix
    """

    __slots__ = ("_mean", "_covariance")

    def __init__(self, mean, covariance):
        mean = np.array(mean, dtype=float).reshape(-1)
        covariance = np.array(covariance, dtype=float)
        d = mean.shape[0]
        if covariance.shape != (d, d):
            raise ContractViolation(
                f"covariance shape {covariance.shape} does not match mean dimension {d}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(covariance))):
            raise NumericalError("Gaussian parameters must be finite")
        covariance = 0.5 * (covariance + covariance.T)
        eigenvalues = np.linalg.eigvalsh(covariance)
        floor = EIGENVALUE_FLOOR * np.trace(covariance) / d
        if eigenvalues[0] <= 0.0 or eigenvalues[0] < floor:
            raise NumericalError(
                f"covariance is not positive definite (smallest eigenvalue {eigenvalues[0]:.3e})"
            )
        mean.setflags(write=False)
        covariance.setflags(write=False)
        self._mean = mean
        self._covariance = covariance

    @property
    def mean(self):
        return self._mean

    @property
    def covariance(self):
        return self._covariance

    @property
    def dimension(self):
        return self._mean.shape[0]

    def precision(self):
        """Inverse covariance"""
        factor = _cholesky(self._covariance)
        return linalg.cho_solve(factor, np.eye(self.dimension))

    def __repr__(self):
        return f"Gaussian(mean={self._mean.tolist()}, covariance={self._covariance.tolist()})"


def _cholesky(matrix):
    try:
        return linalg.cho_factor(matrix, lower=True)
    except linalg.LinAlgError as e:
        raise NumericalError(f"Cholesky factorization failed: {e}", np.linalg.cond(matrix)) from e


def kl_divergence(p, q):
    """
    KL(p || q) between two Gaussians of equal dimension.

    Returns:
        ½[ln(|Σq|/|Σp|) + tr(Σq⁻¹Σp) + (μq−μp)ᵀΣq⁻¹(μq−μp) − d], clamped at 0
    """
    if p.dimension != q.dimension:
        raise ContractViolation(f"dimension mismatch: {p.dimension} vs {q.dimension}")
    q_factor = _cholesky(q.covariance)
    p_factor = _cholesky(p.covariance)
    log_det_q = 2.0 * np.sum(np.log(np.diag(q_factor[0])))
    log_det_p = 2.0 * np.sum(np.log(np.diag(p_factor[0])))
    trace_term = np.trace(linalg.cho_solve(q_factor, p.covariance))
    diff = q.mean - p.mean
    mahalanobis = diff @ linalg.cho_solve(q_factor, diff)
    value = 0.5 * (log_det_q - log_det_p + trace_term + mahalanobis - p.dimension)
    return max(float(value), 0.0)


def sample(g, rng):
    """
    Draw mean + L z with L Lᵀ = Σ and z ~ N(0, I).

    Args:
        g: Gaussian to sample from
        rng: numpy Generator owned by the caller

    Returns:
        Sample vector of length g.dimension
    """
    try:
        lower = np.linalg.cholesky(g.covariance)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"cannot factor covariance for sampling: {e}") from e
    z = rng.standard_normal(g.dimension)
    return g.mean + lower @ z
