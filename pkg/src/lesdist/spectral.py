"""Leading eigenvalues of SPD operators and their error bounds.

The randomized estimator is the fixed-rank Nystrom sketch: a shifted
Nystrom approximation built from one block product ``W @ Omega`` and
truncated to rank ``K``.  Its expected error is bounded in terms of the
spectral tail, see :func:`error_bounds`.

Random draws use ``numpy.random.Generator(PCG64(seed))`` and its ziggurat
normal sampler, which is stable across platforms for a fixed numpy version.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy import linalg

from .errors import ConfigurationError, NumericalError
from .operator import SpdOperator, operator_matmul

MACHINE_MU = 2.2e-16
CHOLESKY_RETRIES = 3
EXACT_MAX_N = 2048


@dataclass(frozen=True)
class Spectrum:
    """Leading eigenvalues, sorted in descending order and clamped at zero."""

    values: np.ndarray
    rank_k: int
    sketch_m: int = 0
    seed: int = 0
    shift_nu: float = 0.0
    method: Literal["exact", "nystrom"] = "exact"

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size != self.rank_k:
            raise ConfigurationError(f"expected {self.rank_k} eigenvalues, got shape {vals.shape}")
        if (vals < 0).any() or (np.diff(vals) > 0).any():
            raise ConfigurationError("spectrum values must be nonnegative and non-increasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.rank_k

    def truncate(self, k: int) -> "Spectrum":
        """The rank-``k`` prefix of this spectrum."""
        if not 0 < k <= self.rank_k:
            raise ConfigurationError(f"cannot truncate rank {self.rank_k} to {k}")
        return Spectrum(self.values[:k], k, self.sketch_m, self.seed, self.shift_nu, self.method)


@dataclass(frozen=True)
class ErrorBound:
    """Expected-error bounds for a rank-``K`` sketch with ``M`` columns.

    ``validity`` is ``None`` when no estimate was supplied, otherwise whether
    every relative error ``|lam_i - lam_hat_i| / (lam_i + gamma)`` is at most
    0.5828 (the range where the log bound is derived).
    """

    eig_bound: float
    log_eig_bound: float
    tail_sum: float
    validity: Optional[bool] = None


def _sorted_desc(values: np.ndarray) -> np.ndarray:
    order = np.argsort(-values, kind="stable")
    return values[order]


def _as_dense(op) -> np.ndarray:
    if isinstance(op, SpdOperator):
        return op.matrix
    A = np.asarray(op, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {A.shape}")
    return A


def _matmul(op, V: np.ndarray) -> np.ndarray:
    if isinstance(op, SpdOperator):
        return operator_matmul(op, V)
    return _as_dense(op) @ V


def _size(op) -> int:
    return op.size if isinstance(op, SpdOperator) else _as_dense(op).shape[0]


def approx_eigenvalues(op, K: int, M: Optional[int] = None, seed: int = 0) -> Spectrum:
    """Estimate the ``K`` leading eigenvalues with a fixed-rank Nystrom sketch.

    Parameters
    ----------
    op : SpdOperator or ndarray
        Symmetric PSD matrix, accessed only through products ``op @ Omega``.
    K : int
        Number of eigenvalues returned.
    M : int, optional
        Sketch width, ``K + 2 <= M <= N``.  Defaults to ``2 * K``.
    seed : int
        Seed of the Gaussian test matrix.

    Returns
    -------
    Spectrum
        ``method="nystrom"``; ``shift_nu`` is the shift actually subtracted.
    """
    n = _size(op)
    M = 2 * K if M is None else M
    if K < 1:
        raise ConfigurationError("K must be positive")
    if M < K + 2:
        raise ConfigurationError(f"sketch size M={M} must be at least K+2={K + 2}")
    if M > n:
        raise ConfigurationError(f"sketch size M={M} exceeds operator size N={n}")
    if seed < 0:
        raise ConfigurationError("seed must be nonnegative")

    rng = np.random.Generator(np.random.PCG64(seed))
    omega = rng.standard_normal((n, M))
    omega, _ = linalg.qr(omega, mode="economic")
    Y0 = _matmul(op, omega)
    if not np.all(np.isfinite(Y0)):
        raise NumericalError("non-finite values in W @ Omega")
    nu = MACHINE_MU * np.linalg.norm(Y0)  # Frobenius

    for attempt in range(CHOLESKY_RETRIES + 1):
        Y = Y0 + nu * omega
        B = omega.T @ Y
        try:
            C = linalg.cholesky(0.5 * (B + B.T), lower=False)
            break
        except linalg.LinAlgError:
            if attempt == CHOLESKY_RETRIES:
                raise NumericalError(f"Cholesky failed with final shift nu={nu:.3e}") from None
            nu = 2 * nu if nu > 0 else MACHINE_MU

    # Y C^{-1} via a triangular solve: C^T Z^T = Y^T
    Z = linalg.solve_triangular(C, Y.T, trans="T", lower=False).T
    sigma = linalg.svd(Z, compute_uv=False)
    lam = np.maximum(0.0, sigma[:K] ** 2 - nu)
    return Spectrum(_sorted_desc(lam), K, M, seed, float(nu), "nystrom")


def exact_eigenvalues(op, K: int, max_n: int = 20000) -> Spectrum:
    """Top ``K`` eigenvalues from a full symmetric eigendecomposition.

    Negative round-off eigenvalues are clamped to zero.  If ``K`` exceeds
    the operator size the result is padded with zeros.
    """
    if K < 1:
        raise ConfigurationError("K must be positive")
    if isinstance(op, SpdOperator) and op.storage == "implicit" and op.size > max_n:
        raise ConfigurationError(f"operator of size {op.size} is too large to densify (limit {max_n})")
    A = _as_dense(op)
    vals = linalg.eigvalsh(A)[::-1]
    vals = np.maximum(vals, 0.0)
    if K > vals.size:
        vals = np.concatenate([vals, np.zeros(K - vals.size)])
    return Spectrum(_sorted_desc(vals[:K]), K, 0, 0, 0.0, "exact")


def full_spectrum(op) -> np.ndarray:
    """All eigenvalues of a dense operator, descending, clamped at zero."""
    return exact_eigenvalues(op, _size(op)).values


def error_bounds(spectrum, K: int, M: int, gamma: float = 0.0, estimate=None) -> ErrorBound:
    """Expected-error bounds of the rank-``K`` sketch with ``M`` columns.

    Parameters
    ----------
    spectrum : Spectrum or array_like
        The full exact spectrum (all ``N`` eigenvalues).
    K, M : int
        Rank and sketch width, ``M >= K + 2``.
    gamma : float
        Log regularisation.
    estimate : Spectrum or array_like, optional
        Estimated leading eigenvalues, used only to set ``validity``.

    Notes
    -----
    ``eig_bound = K / (M - K - 1) * tail`` and
    ``log_eig_bound = 1.5 * K * tail / ((M - K - 1) * (lam_K + gamma))`` with
    ``tail`` the sum of the eigenvalues beyond ``K``.
    """
    if M <= K + 1:
        raise ConfigurationError(f"need M > K + 1, got K={K}, M={M}")
    lam = np.asarray(spectrum.values if isinstance(spectrum, Spectrum) else spectrum, dtype=np.float64)
    lam = np.maximum(_sorted_desc(lam), 0.0)
    if lam.size < K:
        raise ConfigurationError(f"spectrum has {lam.size} values, need at least K={K}")
    tail = float(lam[K:].sum())
    coef = K / (M - K - 1)
    eig_bound = coef * tail
    log_bound = 1.5 * coef * tail / (lam[K - 1] + gamma) if tail > 0 else 0.0
    validity = None
    if estimate is not None:
        est = np.asarray(estimate.values if isinstance(estimate, Spectrum) else estimate, dtype=np.float64)
        ratio = np.abs(lam[:K] - est[:K]) / (lam[:K] + gamma)
        validity = bool(np.all(ratio <= 0.5828))
    return ErrorBound(float(eig_bound), float(log_bound), tail, validity)


def estimate_spectrum(op, K: int, M: Optional[int] = None, seed: int = 0,
                      exact_threshold: int = EXACT_MAX_N) -> Spectrum:
    """Exact eigenvalues for small operators, the Nystrom sketch otherwise.

    The exact path is used when ``N <= exact_threshold``, when ``K`` exceeds
    ``N`` (zero padding), or when the sketch width would exceed ``N``.
    """
    n = _size(op)
    M = 2 * K if M is None else M
    if n <= exact_threshold or K > n or M > n:
        return exact_eigenvalues(op, K)
    return approx_eigenvalues(op, K, M, seed)
