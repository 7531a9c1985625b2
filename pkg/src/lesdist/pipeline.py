"""End-to-end signature computation: point cloud -> operator -> spectrum -> descriptor."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import Literal, Optional, Sequence

from .analysis import pairwise_distance_matrix
from .data import DEFAULT_SUBSAMPLE_CAP, Metric, PointCloud, kernel_scale_from_points
from .distances import DistanceMatrix, LesDescriptor, les_descriptor
from .errors import ConfigurationError
from .operator import build_operator
from .spectral import EXACT_MAX_N, Spectrum, estimate_spectrum


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a signature computation.

    ``m`` defaults to ``2 * k``.  ``mode`` selects operator storage and
    ``exact_threshold`` the largest ``N`` handled by the exact eigensolver.
    """

    k: int = 200
    m: Optional[int] = None
    gamma: float = 1e-8
    sigma_multiplier: float = 2.0
    seed: int = 0
    mode: Literal["auto", "dense", "implicit"] = "auto"
    exact_threshold: int = EXACT_MAX_N
    metric: Metric = "euclidean"
    subsample_cap: int = DEFAULT_SUBSAMPLE_CAP

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError("k must be positive")
        if self.m is None:
            object.__setattr__(self, "m", 2 * self.k)
        if self.m < self.k + 2:
            raise ConfigurationError(f"m={self.m} must be at least k+2={self.k + 2}")
        if not 0 < self.gamma < 1:
            raise ConfigurationError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.sigma_multiplier > 0:
            raise ConfigurationError("sigma_multiplier must be positive")
        if self.seed < 0:
            raise ConfigurationError("seed must be nonnegative")
        if self.mode not in ("auto", "dense", "implicit"):
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.exact_threshold < 0:
            raise ConfigurationError("exact_threshold must be nonnegative")

    def replace(self, **changes) -> "RunConfig":
        base = asdict(self)
        if "k" in changes and "m" not in changes:
            base["m"] = None
        base.update(changes)
        return RunConfig(**base)


def compute_spectrum(cloud: PointCloud, cfg: RunConfig = RunConfig()):
    """Return ``(Spectrum, sigma2)`` for one point cloud."""
    n = cloud.n
    if n * (n - 1) // 2 > cfg.subsample_cap:
        warnings.warn(f"{cloud.name}: kernel scale estimated from {cfg.subsample_cap} sampled pairs",
                      stacklevel=2)
    sigma2 = kernel_scale_from_points(cloud, cfg.sigma_multiplier, cfg.metric,
                                      cfg.subsample_cap, cfg.seed)
    if cfg.k > n:
        warnings.warn(f"{cloud.name}: k={cfg.k} exceeds N={n}; using exact eigenvalues padded with zeros",
                      stacklevel=2)
    op = build_operator(cloud, sigma2, cfg.mode, cfg.metric)
    spec = estimate_spectrum(op, cfg.k, cfg.m, cfg.seed, cfg.exact_threshold)
    return spec, sigma2


def compute_descriptor(cloud: PointCloud, cfg: RunConfig = RunConfig()) -> LesDescriptor:
    """Signature of one point cloud under ``cfg``."""
    spec, _ = compute_spectrum(cloud, cfg)
    return les_descriptor(spec, cfg.gamma, name=cloud.name, seed=cfg.seed,
                          sigma_multiplier=cfg.sigma_multiplier, metric=cfg.metric)


def les_distances(clouds: Sequence[PointCloud], cfg: RunConfig = RunConfig(),
                  method: str = "les") -> DistanceMatrix:
    """Signatures of every dataset followed by all pairwise distances."""
    return pairwise_distance_matrix([compute_descriptor(c, cfg) for c in clouds], method)
