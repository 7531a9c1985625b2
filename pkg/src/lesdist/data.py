"""Point-cloud ingestion, synthetic tori and pairwise distances.

Everything here is a pure function of its inputs.  Point clouds are stored
as ``(N, d)`` float64 arrays, one sample per row.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DataError

BINARY_MAGIC = b"LESPC1\0"
_HEADER = struct.Struct("<QQ")

# Callback signature for custom metrics: (A (n, d), B (m, d)) -> squared distances (n, m).
SqDistFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
Metric = Union[Literal["euclidean"], SqDistFn]


@dataclass(frozen=True)
class PointCloud:
    """A dataset of ``N`` samples with ``d`` real features.

    Parameters
    ----------
    points : ndarray, shape (N, d)
        Samples as rows.  Copied to a read-only float64 array.
    name : str
        Label carried into descriptors and distance matrices.
    source : {"file", "generator"}
        Provenance of the samples.
    seed : int, optional
        Seed used by the generator, if any.
    """

    points: np.ndarray
    name: str = "dataset"
    source: Literal["file", "generator"] = "generator"
    seed: Optional[int] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise DataError(f"{self.name}: points must be a 2-D array, got ndim={pts.ndim}")
        if pts.shape[0] < 2 or pts.shape[1] < 1:
            raise DataError(f"{self.name}: need N >= 2 and d >= 1, got shape {pts.shape}")
        bad = ~np.isfinite(pts).all(axis=1)
        if bad.any():
            raise DataError(f"{self.name}: non-finite value in row {int(np.argmax(bad))}")
        if self.source not in ("file", "generator"):
            raise DataError(f"unknown source {self.source!r}")
        if self.seed is not None and self.seed < 0:
            raise DataError("seed must be nonnegative")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class ToriConfig:
    """Parameters of the 2-D and 3-D tori benchmark shapes.

    ``c`` scales the innermost minor radius: ``R2`` for the 2-D torus and
    ``R3`` for the 3-D torus.  ``seed=None`` draws fresh angles on every call.
    """

    R1: float = 10.0
    R2: float = 3.0
    R3: float = 1.0
    c: float = 1.0
    n_points: int = 1000
    seed: Optional[int] = 0

    def __post_init__(self):
        if min(self.R1, self.R2, self.R3) <= 0:
            raise DataError("tori radii must be positive")
        if not 0 < self.c <= 1:
            raise DataError(f"scale factor c must lie in (0, 1], got {self.c}")
        if self.n_points < 2:
            raise DataError("n_points must be at least 2")
        if self.seed is not None and self.seed < 0:
            raise DataError("seed must be nonnegative")


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def _parse_csv(text: str, name: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = line.split(",") if "," in line else line.split()
        row_idx = len(rows)
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise DataError(f"{name}: cannot parse row {row_idx} (line {lineno}): {raw!r}") from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataError(
                f"{name}: ragged row {row_idx} (line {lineno}): expected {width} columns, got {len(values)}"
            )
        if not all(np.isfinite(values)):
            raise DataError(f"{name}: non-finite value in row {row_idx} (line {lineno})")
        rows.append(values)
    if not rows:
        raise DataError(f"{name}: empty file")
    return np.array(rows, dtype=np.float64)


def _parse_binary(blob: bytes, name: str) -> np.ndarray:
    start = len(BINARY_MAGIC)
    if not blob.startswith(BINARY_MAGIC):
        raise DataError(f"{name}: bad magic bytes for binary-f64 point cloud")
    if len(blob) < start + _HEADER.size:
        raise DataError(f"{name}: truncated header")
    n, d = _HEADER.unpack_from(blob, start)
    payload = blob[start + _HEADER.size:]
    if n == 0 or d == 0:
        raise DataError(f"{name}: empty file")
    if len(payload) != 8 * n * d:
        raise DataError(f"{name}: expected {n * d} float64 values, found {len(payload) // 8}")
    pts = np.frombuffer(payload, dtype="<f8").reshape(n, d).astype(np.float64)
    bad = ~np.isfinite(pts).all(axis=1)
    if bad.any():
        raise DataError(f"{name}: non-finite value in row {int(np.argmax(bad))}")
    return pts


def load_point_cloud(path, format: Optional[str] = None, name: Optional[str] = None) -> PointCloud:
    """Read a point cloud from a CSV or binary-f64 file.

    ``format`` is ``"csv"`` or ``"binary-f64"``; when omitted it is sniffed
    from the magic bytes.  CSV rows may be separated by commas or whitespace
    and lines starting with ``#`` are skipped.
    """
    path = Path(path)
    label = name or path.stem
    blob = path.read_bytes()
    if format is None:
        format = "binary-f64" if blob.startswith(BINARY_MAGIC) else "csv"
    if format == "binary-f64":
        pts = _parse_binary(blob, label)
    elif format == "csv":
        try:
            text = blob.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"{label}: not valid UTF-8 text") from exc
        pts = _parse_csv(text, label)
    else:
        raise DataError(f"unknown point-cloud format {format!r}")
    return PointCloud(pts, name=label, source="file")


def save_point_cloud(cloud: PointCloud, path, format: str = "binary-f64") -> None:
    """Write ``cloud`` to ``path``; binary-f64 round-trips bit for bit."""
    path = Path(path)
    if format == "binary-f64":
        pts = np.ascontiguousarray(cloud.points, dtype="<f8")
        path.write_bytes(BINARY_MAGIC + _HEADER.pack(*pts.shape) + pts.tobytes())
    elif format == "csv":
        lines = [",".join(repr(float(v)) for v in row) for row in cloud.points]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        raise DataError(f"unknown point-cloud format {format!r}")


# ---------------------------------------------------------------------------
# Synthetic tori
# ---------------------------------------------------------------------------

def torus2_points(theta1, theta2, R1=10.0, R2=3.0):
    """Embed angle pairs on the 2-D torus in R^3."""
    theta1 = np.asarray(theta1, dtype=np.float64)
    theta2 = np.asarray(theta2, dtype=np.float64)
    ring = R1 + R2 * np.cos(theta2)
    return np.column_stack([ring * np.cos(theta1), ring * np.sin(theta1), R2 * np.sin(theta2)])


def torus3_points(theta1, theta2, theta3, R1=10.0, R2=3.0, R3=1.0):
    """Embed angle triples on the 3-D torus in R^4."""
    theta1 = np.asarray(theta1, dtype=np.float64)
    theta2 = np.asarray(theta2, dtype=np.float64)
    theta3 = np.asarray(theta3, dtype=np.float64)
    tube = R2 + R3 * np.cos(theta3)
    ring = R1 + tube * np.cos(theta2)
    return np.column_stack([
        ring * np.cos(theta1),
        ring * np.sin(theta1),
        tube * np.sin(theta2),
        R3 * np.sin(theta3),
    ])


def _angles(cfg: ToriConfig, count: int):
    # theta1, theta2 are drawn first so equal seeds give T2 and T3 shared angles
    rng = np.random.default_rng(cfg.seed)
    return [rng.uniform(0.0, 2 * np.pi, cfg.n_points) for _ in range(count)]


def generate_torus2(cfg: ToriConfig, name: Optional[str] = None) -> PointCloud:
    """Sample ``cfg.n_points`` points from the 2-D torus with minor radius ``c * R2``."""
    t1, t2 = _angles(cfg, 2)
    pts = torus2_points(t1, t2, cfg.R1, cfg.c * cfg.R2)
    label = name or ("T2" if cfg.c == 1 else f"T2_Sc{cfg.c:g}")
    return PointCloud(pts, name=label, source="generator", seed=cfg.seed)


def generate_torus3(cfg: ToriConfig, name: Optional[str] = None) -> PointCloud:
    """Sample ``cfg.n_points`` points from the 3-D torus with innermost radius ``c * R3``."""
    t1, t2, t3 = _angles(cfg, 3)
    pts = torus3_points(t1, t2, t3, cfg.R1, cfg.R2, cfg.c * cfg.R3)
    label = name or ("T3" if cfg.c == 1 else f"T3_Sc{cfg.c:g}")
    return PointCloud(pts, name=label, source="generator", seed=cfg.seed)


# ---------------------------------------------------------------------------
# Distances and kernel scale
# ---------------------------------------------------------------------------

def _points(X) -> np.ndarray:
    return X.points if isinstance(X, PointCloud) else np.asarray(X, dtype=np.float64)


def sq_dist_block(A: np.ndarray, B: np.ndarray, metric: Metric = "euclidean") -> np.ndarray:
    """Squared distances between the rows of ``A`` and the rows of ``B``.

    Each entry depends only on its own pair of rows, so any row blocking of
    ``A`` reproduces the full matrix bit for bit.
    """
    if metric == "euclidean":
        return cdist(A, B, "sqeuclidean")
    if callable(metric):
        out = np.asarray(metric(A, B), dtype=np.float64)
        if out.shape != (A.shape[0], B.shape[0]):
            raise DataError(f"metric callback returned shape {out.shape}, expected {(A.shape[0], B.shape[0])}")
        return out
    raise DataError(f"unknown metric {metric!r}")


def pairwise_sq_dists(X, metric: Metric = "euclidean") -> np.ndarray:
    """Full ``(N, N)`` matrix of squared pairwise distances.

    The result is symmetrised and its diagonal set to zero, so custom metrics
    only need to be correct up to those two properties.
    """
    pts = _points(X)
    D2 = sq_dist_block(pts, pts, metric)
    if metric != "euclidean":
        D2 = 0.5 * (D2 + D2.T)
        np.fill_diagonal(D2, 0.0)
        if (D2 < 0).any():
            raise DataError("metric callback produced negative squared distances")
    return D2


DEFAULT_SUBSAMPLE_CAP = 2_000_000


def kernel_scale(sq_dists: np.ndarray, multiplier: float = 2.0,
                 subsample_cap: int = DEFAULT_SUBSAMPLE_CAP, seed: int = 0) -> float:
    """Kernel scale ``sigma^2 = multiplier * median`` of off-diagonal squared distances.

    When there are more than ``subsample_cap`` distinct pairs, the median is
    taken over ``subsample_cap`` pairs drawn uniformly (seeded).
    """
    if multiplier <= 0:
        raise DataError("multiplier must be positive")
    sq = np.asarray(sq_dists, dtype=np.float64)
    n = sq.shape[0]
    if sq.ndim != 2 or sq.shape[1] != n or n < 2:
        raise DataError("sq_dists must be a square matrix with at least two rows")
    n_pairs = n * (n - 1) // 2
    if n_pairs > subsample_cap:
        i, j = _sample_pairs(n, subsample_cap, seed)
        vals = sq[i, j]
    else:
        vals = sq[np.triu_indices(n, k=1)]
    return _scale_from_values(vals, multiplier)


def kernel_scale_from_points(X, multiplier: float = 2.0, metric: Metric = "euclidean",
                             subsample_cap: int = DEFAULT_SUBSAMPLE_CAP, seed: int = 0) -> float:
    """Like :func:`kernel_scale` but never materialises the ``N x N`` matrix."""
    pts = _points(X)
    n = pts.shape[0]
    if n * (n - 1) // 2 <= subsample_cap:
        return kernel_scale(pairwise_sq_dists(pts, metric), multiplier, subsample_cap, seed)
    i, j = _sample_pairs(n, subsample_cap, seed)
    vals = np.empty(subsample_cap)
    step = 65536
    for s in range(0, subsample_cap, step):
        a, b = pts[i[s:s + step]], pts[j[s:s + step]]
        if metric == "euclidean":
            vals[s:s + step] = np.einsum("ij,ij->i", a - b, a - b)
        else:
            vals[s:s + step] = [float(sq_dist_block(a[k:k + 1], b[k:k + 1], metric)[0, 0])
                                for k in range(len(a))]
    return _scale_from_values(vals, multiplier)


def _sample_pairs(n: int, size: int, seed: int):
    # Uniform over ordered pairs with i != j, hence uniform over unordered pairs.
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size)
    j = rng.integers(0, n - 1, size)
    j = j + (j >= i)
    return i, j


def _scale_from_values(vals: np.ndarray, multiplier: float) -> float:
    if not (vals > 0).any():
        raise DataError("degenerate distances: all pairwise distances are zero")
    return float(multiplier * np.median(vals))
