"""Log-Euclidean signatures, bounds and aligned baseline distances.

The unaligned distances (:func:`les_distance`, :func:`le_lower_bound`,
:func:`le_upper_bound`, :func:`imd_approx`) only need ordered spectra.  The
aligned baselines (:func:`le_exact`, :func:`loghs_distance`,
:func:`ai_exact`, :func:`euclid_exact`, :func:`specgw_exact`) need dense
operators with a known row correspondence.

All distances are returned as norms; square them for the ``d^2`` forms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import linalg

from .errors import ConfigurationError, DataError, NumericalError
from .operator import SpdOperator
from .spectral import Spectrum

DESCRIPTOR_SCHEMA = "les-desc-v1"
EIG_FLOOR = 1e-300
SPD_TOL = 1e-10


def default_t_grid(n: int = 256) -> np.ndarray:
    """Geometric grid on ``[1e-2, 1e2]`` used to approximate ``sup_t``."""
    return np.geomspace(1e-2, 1e2, n)


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LesDescriptor:
    """Regularised log-spectrum ``f_i = log(lam_i + gamma)`` of one dataset."""

    f: np.ndarray
    gamma: float
    rank_k: int
    sigma_multiplier: float = 2.0
    metric: str = "euclidean"
    seed: int = 0
    method: str = "exact"
    dataset_name: str = "dataset"

    def __post_init__(self):
        f = np.array(self.f, dtype=np.float64)
        if f.ndim != 1 or f.size != self.rank_k:
            raise ConfigurationError(f"descriptor length {f.size} does not match k={self.rank_k}")
        if not self.gamma > 0:
            raise ConfigurationError("gamma must be positive")
        if not np.all(np.isfinite(f)):
            raise DataError(f"{self.dataset_name}: non-finite descriptor entries")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues recovered from ``f`` (exact down to about ``gamma * eps``)."""
        return np.maximum(np.exp(self.f) - self.gamma, 0.0)

    def to_json(self) -> str:
        payload = {
            "schema": DESCRIPTOR_SCHEMA,
            "name": self.dataset_name,
            "k": self.rank_k,
            "gamma": self.gamma,
            "sigma_multiplier": self.sigma_multiplier,
            "metric": self.metric,
            "seed": self.seed,
            "method": self.method,
            "f": [float(v) for v in self.f],
        }
        return json.dumps(payload, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LesDescriptor":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid descriptor JSON: {exc}") from exc
        if not isinstance(obj, dict) or obj.get("schema") != DESCRIPTOR_SCHEMA:
            raise DataError(f"not a {DESCRIPTOR_SCHEMA} descriptor")
        try:
            return cls(
                f=np.asarray(obj["f"], dtype=np.float64),
                gamma=float(obj["gamma"]),
                rank_k=int(obj["k"]),
                sigma_multiplier=float(obj["sigma_multiplier"]),
                metric=str(obj["metric"]),
                seed=int(obj["seed"]),
                method=str(obj["method"]),
                dataset_name=str(obj["name"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed descriptor: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "LesDescriptor":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def les_descriptor(spectrum, gamma: float, *, name: str = "dataset", seed: Optional[int] = None,
                   sigma_multiplier: float = 2.0, metric: str = "euclidean") -> LesDescriptor:
    """Map a spectrum to its signature ``[log(lam_1 + gamma), ..., log(lam_K + gamma)]``."""
    if not gamma > 0:
        raise ConfigurationError("gamma must be positive")
    if isinstance(spectrum, Spectrum):
        lam, seed_, method = spectrum.values, spectrum.seed, spectrum.method
    else:
        lam, seed_, method = np.asarray(spectrum, dtype=np.float64), 0, "exact"
    if (lam < 0).any():
        raise ConfigurationError("eigenvalues must be nonnegative")
    return LesDescriptor(np.log(lam + gamma), gamma, lam.size, sigma_multiplier,
                         metric if isinstance(metric, str) else "custom",
                         seed_ if seed is None else seed, method, name)


def check_comparable(a: LesDescriptor, b: LesDescriptor) -> None:
    if a.rank_k != b.rank_k:
        raise ConfigurationError(
            f"descriptors {a.dataset_name!r} and {b.dataset_name!r} have different k ({a.rank_k} vs {b.rank_k})")
    if a.gamma != b.gamma:
        raise ConfigurationError(
            f"descriptors {a.dataset_name!r} and {b.dataset_name!r} have different gamma ({a.gamma:g} vs {b.gamma:g})")


def les_distance(a: LesDescriptor, b: LesDescriptor, squared: bool = False) -> float:
    """Euclidean distance between two comparable descriptors.

    Raises :class:`ConfigurationError` unless ``k`` and ``gamma`` match exactly.
    """
    check_comparable(a, b)
    diff = a.f - b.f
    d2 = float(diff @ diff)
    return d2 if squared else float(np.sqrt(d2))


# ---------------------------------------------------------------------------
# Spectral bounds of the log-Euclidean distance
# ---------------------------------------------------------------------------

def _spectrum_values(s) -> np.ndarray:
    vals = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=np.float64)
    return np.sort(vals)[::-1]


def _log_pair(sa, sb):
    a, b = _spectrum_values(sa), _spectrum_values(sb)
    if a.shape != b.shape:
        raise ConfigurationError(f"spectra have different lengths ({a.size} vs {b.size})")
    if (a <= 0).any() or (b <= 0).any():
        raise NumericalError("unregularised bounds need strictly positive eigenvalues")
    return np.log(a), np.log(b)


def le_lower_bound(sa, sb, squared: bool = False) -> float:
    """Lower bound on the log-Euclidean distance from eigenvalues paired in equal order."""
    la, lb = _log_pair(sa, sb)
    d2 = float(np.sum((la - lb) ** 2))
    return d2 if squared else float(np.sqrt(d2))


def le_upper_bound(sa, sb, squared: bool = False) -> float:
    """Upper bound on the log-Euclidean distance from eigenvalues paired in opposite order."""
    la, lb = _log_pair(sa, sb)
    d2 = float(np.sum((la - lb[::-1]) ** 2))
    return d2 if squared else float(np.sqrt(d2))


# ---------------------------------------------------------------------------
# Aligned baselines
# ---------------------------------------------------------------------------

def _dense(W) -> np.ndarray:
    A = W.matrix if isinstance(W, SpdOperator) else np.asarray(W, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {A.shape}")
    return A


def _pair(Wa, Wb):
    A, B = _dense(Wa), _dense(Wb)
    if A.shape != B.shape:
        raise ConfigurationError(f"aligned distances need equal sizes, got {A.shape} and {B.shape}")
    return A, B


def _spd_eigh(A: np.ndarray):
    vals, vecs = linalg.eigh(0.5 * (A + A.T))
    if vals[0] < -SPD_TOL:
        raise NumericalError(f"matrix is not SPD (smallest eigenvalue {vals[0]:.3e})")
    return np.maximum(vals, EIG_FLOOR), vecs


def spd_func(A: np.ndarray, fn) -> np.ndarray:
    """Apply a scalar function to an SPD matrix through its eigendecomposition."""
    vals, vecs = _spd_eigh(A)
    return (vecs * fn(vals)) @ vecs.T


def spd_log(A: np.ndarray) -> np.ndarray:
    return spd_func(A, np.log)


def le_exact(Wa, Wb, squared: bool = False) -> float:
    """Log-Euclidean distance ``||log Wa - log Wb||_F`` of aligned SPD matrices."""
    A, B = _pair(Wa, Wb)
    d2 = float(np.sum((spd_log(A) - spd_log(B)) ** 2))
    return d2 if squared else float(np.sqrt(d2))


def loghs_distance(Wa, Wb, gamma: float, mu: float, squared: bool = False) -> float:
    """Log-Hilbert-Schmidt distance between ``Wa + gamma I`` and ``Wb + mu I``.

    ``(log gamma - log mu)^2 + ||log(Wa/gamma + I) - log(Wb/mu + I)||_F^2``;
    for ``gamma == mu`` this is the log-Euclidean distance of the
    regularised matrices.
    """
    if not (gamma > 0 and mu > 0):
        raise ConfigurationError("gamma and mu must be positive")
    A, B = _pair(Wa, Wb)
    _spd_eigh(A), _spd_eigh(B)
    eye = np.eye(A.shape[0])
    diff = spd_log(A / gamma + eye) - spd_log(B / mu + eye)
    d2 = float((np.log(gamma) - np.log(mu)) ** 2 + np.sum(diff ** 2))
    return d2 if squared else float(np.sqrt(d2))


def ai_exact(Wa, Wb, squared: bool = False) -> float:
    """Affine-invariant distance ``||log(Wa^{-1/2} Wb Wa^{-1/2})||_F``."""
    A, B = _pair(Wa, Wb)
    vals, vecs = linalg.eigh(0.5 * (A + A.T))
    if vals[0] <= 0:
        raise NumericalError(f"first matrix is singular or indefinite (smallest eigenvalue {vals[0]:.3e})")
    _spd_eigh(B)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.T
    C = inv_sqrt @ B @ inv_sqrt
    ev = np.maximum(linalg.eigvalsh(0.5 * (C + C.T)), EIG_FLOOR)
    d2 = float(np.sum(np.log(ev) ** 2))
    return d2 if squared else float(np.sqrt(d2))


def euclid_exact(Wa, Wb) -> float:
    """Frobenius distance ``||Wa - Wb||_F``."""
    A, B = _pair(Wa, Wb)
    return float(np.linalg.norm(A - B))


def _check_grid(t_grid) -> np.ndarray:
    t = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=np.float64).ravel()
    if t.size == 0:
        raise ConfigurationError("t_grid must be nonempty")
    if (t <= 0).any():
        raise ConfigurationError("t_grid values must be positive")
    return t


def specgw_exact(Wa, Wb, t_grid=None) -> float:
    """Spectral Gromov-Wasserstein distance for known correspondence.

    ``max_t exp(-(t + 1/t)) ||Wa^t - Wb^t||_F`` over ``t_grid``.
    """
    t = _check_grid(t_grid)
    A, B = _pair(Wa, Wb)
    va, Ua = _spd_eigh(A)
    vb, Ub = _spd_eigh(B)
    best = 0.0
    for ti in t:
        diff = (Ua * va ** ti) @ Ua.T - (Ub * vb ** ti) @ Ub.T
        best = max(best, float(np.exp(-(ti + 1 / ti)) * np.linalg.norm(diff)))
    return best


def imd_approx(sa, sb, gamma: Optional[float] = None, t_grid=None) -> float:
    """Heat-trace distance from truncated spectra.

    ``max_t exp(-2(t + 1/t)) |sum_i lam_a_i^t - sum_i lam_b_i^t|`` over
    ``t_grid`` using raw eigenvalues clamped at zero.  ``gamma`` is accepted
    for symmetry with :func:`les_distance` and ignored.
    """
    t = _check_grid(t_grid)
    a = np.maximum(_spectrum_values(sa), 0.0)
    b = np.maximum(_spectrum_values(sb), 0.0)
    if a.shape != b.shape:
        raise ConfigurationError(f"spectra have different lengths ({a.size} vs {b.size})")
    ta = (a[None, :] ** t[:, None]).sum(axis=1)
    tb = (b[None, :] ** t[:, None]).sum(axis=1)
    return float(np.max(np.exp(-2 * (t + 1 / t)) * np.abs(ta - tb)))


# ---------------------------------------------------------------------------
# Distance matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of pairwise dataset distances."""

    values: np.ndarray
    method: str
    labels: tuple = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        r = vals.shape[0]
        if vals.ndim != 2 or vals.shape[1] != r:
            raise ConfigurationError(f"distance matrix must be square, got {vals.shape}")
        labels = tuple(self.labels) if self.labels else tuple(f"d{i}" for i in range(r))
        if len(labels) != r:
            raise ConfigurationError(f"{len(labels)} labels for {r} datasets")
        if (vals < 0).any() or not np.allclose(vals, vals.T, rtol=0, atol=1e-12):
            raise ConfigurationError("distance matrix must be symmetric and nonnegative")
        if np.abs(np.diag(vals)).max() > 1e-12:
            raise ConfigurationError("distance matrix must have a zero diagonal")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", labels)

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for lab, row in zip(self.labels, self.values):
            lines.append(lab + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"method": self.method, "labels": list(self.labels),
                           "values": self.values.tolist()}, indent=1) + "\n"

    @classmethod
    def from_csv(cls, text: str, method: str = "unknown") -> "DistanceMatrix":
        rows = [line.split(",") for line in text.strip().splitlines()]
        labels = rows[0][1:]
        vals = [[float(v) for v in row[1:]] for row in rows[1:]]
        return cls(np.array(vals), method, tuple(labels))

    @classmethod
    def from_json(cls, text: str) -> "DistanceMatrix":
        obj = json.loads(text)
        return cls(np.array(obj["values"], dtype=np.float64), obj.get("method", "unknown"),
                   tuple(obj["labels"]))
