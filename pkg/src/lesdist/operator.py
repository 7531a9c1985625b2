"""Symmetric diffusion operator built from a point cloud.

For a Gaussian affinity ``K_ij = exp(-d^2(x_i, x_j) / sigma^2)`` the
density-normalised kernel is ``Wt = Dt^-1 K Dt^-1`` with ``Dt = rowsum(K)``,
and the diffusion operator ``W_DM = D^-1 Wt`` with ``D = rowsum(Wt)``.  The
SPD matrix used downstream is its symmetric conjugate

    W = D^{1/2} W_DM D^{-1/2} = D^{-1/2} Wt D^{-1/2},

so that ``W_ij = s_i K_ij s_j`` with ``s = 1 / (Dt * sqrt(D))``.

In implicit mode ``W`` is never stored: rows are recomputed from the point
cloud on every product, after two passes that accumulate ``Dt`` and ``D``.
"""
from __future__ import annotations

import threading
from typing import Literal, Optional

import numpy as np

from .data import Metric, PointCloud, sq_dist_block
from .errors import ConfigurationError, NumericalError

DENSE_MAX_N = 4096
KERNEL_FLOOR = 1e-300
# Row blocks are zero-padded to a multiple of this many rows before the BLAS
# product so every row goes through the same kernel whatever the batch size.
_ROW_TILE = 64
_BLOCK_BYTES = 1 << 26


def default_batch_rows(n: int) -> int:
    rows = max(1, _BLOCK_BYTES // (8 * max(n, 1)))
    return max(_ROW_TILE, rows - rows % _ROW_TILE)


class SpdOperator:
    """Diffusion operator in dense or implicit storage.

    Use :func:`build_operator` rather than instantiating directly.  The
    degree vectors are computed at most once and are safe to share between
    threads.
    """

    def __init__(self, points: np.ndarray, sigma2: float, storage: str,
                 metric: Metric = "euclidean", batch_rows: Optional[int] = None):
        self.points = points
        self.sigma2 = float(sigma2)
        self.storage = storage
        self.metric = metric
        self.batch_rows = batch_rows or default_batch_rows(points.shape[0])
        self._d_tilde = None
        self._d_vec = None
        self._matrix = None
        self._lock = threading.Lock()

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def __repr__(self):
        return f"SpdOperator(size={self.size}, sigma2={self.sigma2:.6g}, storage={self.storage!r})"

    # -- kernel rows -------------------------------------------------------

    def kernel_rows(self, start: int, stop: int) -> np.ndarray:
        """Rows ``start:stop`` of the Gaussian affinity matrix ``K``."""
        sq = sq_dist_block(self.points[start:stop], self.points, self.metric)
        K = np.exp(-sq / self.sigma2)
        K[K < KERNEL_FLOOR] = 0.0
        return K

    def _blocks(self, batch_rows=None):
        step = batch_rows or self.batch_rows
        for start in range(0, self.size, step):
            yield start, min(start + step, self.size)

    def _compute_degrees(self):
        n = self.size
        d_tilde = np.empty(n)
        for a, b in self._blocks():
            d_tilde[a:b] = self.kernel_rows(a, b).sum(axis=1)
        if not np.all(np.isfinite(d_tilde)) or (d_tilde <= 0).any():
            raise NumericalError("non-finite or zero kernel row sums")
        d_vec = np.empty(n)
        for a, b in self._blocks():
            d_vec[a:b] = (self.kernel_rows(a, b) / d_tilde).sum(axis=1) / d_tilde[a:b]
        if not np.all(np.isfinite(d_vec)) or (d_vec <= 0).any():
            raise NumericalError("non-finite or zero normalised row sums")
        self._d_tilde, self._d_vec = d_tilde, d_vec

    def _ensure_degrees(self):
        if self._d_vec is None:
            with self._lock:
                if self._d_vec is None:
                    self._compute_degrees()

    @property
    def d_tilde(self) -> np.ndarray:
        """Row sums of ``K``."""
        self._ensure_degrees()
        return self._d_tilde

    @property
    def d_vec(self) -> np.ndarray:
        """Row sums of the density-normalised kernel ``Wt``."""
        self._ensure_degrees()
        return self._d_vec

    @property
    def row_scale(self) -> np.ndarray:
        return 1.0 / (self.d_tilde * np.sqrt(self.d_vec))

    def rows(self, start: int, stop: int) -> np.ndarray:
        """Rows ``start:stop`` of ``W``."""
        s = self.row_scale
        return self.kernel_rows(start, stop) * s[start:stop, None] * s[None, :]

    # -- dense access --------------------------------------------------------

    @property
    def matrix(self) -> np.ndarray:
        """The dense ``W`` (materialised on first access in implicit mode)."""
        if self._matrix is None:
            with self._lock:
                if self._matrix is None:
                    W = np.empty((self.size, self.size))
                    for a, b in self._blocks():
                        W[a:b] = self.rows(a, b)
                    W = 0.5 * (W + W.T)
                    W.setflags(write=False)
                    self._matrix = W
        return self._matrix

    def to_row_stochastic(self) -> np.ndarray:
        """Dense ``W_DM = D^{-1/2} W D^{1/2}``."""
        r = np.sqrt(self.d_vec)
        return self.matrix / r[:, None] * r[None, :]


def build_operator(X, sigma2: float, mode: Literal["auto", "dense", "implicit"] = "auto",
                   metric: Metric = "euclidean", batch_rows: Optional[int] = None) -> SpdOperator:
    """Build the symmetric diffusion operator of a point cloud.

    Parameters
    ----------
    X : PointCloud or array_like, shape (N, d)
    sigma2 : float
        Gaussian kernel scale (squared).
    mode : {"auto", "dense", "implicit"}
        ``"auto"`` stores ``W`` densely when ``N <= 4096``.
    metric : "euclidean" or callable
        See :func:`lesdist.data.sq_dist_block`.
    batch_rows : int, optional
        Rows of ``K`` materialised at a time in implicit mode.
    """
    pts = X.points if isinstance(X, PointCloud) else np.asarray(X, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ConfigurationError("need a 2-D point array with N >= 2")
    if not np.isfinite(sigma2) or sigma2 <= 0:
        raise ConfigurationError(f"sigma2 must be positive, got {sigma2}")
    if mode == "auto":
        mode = "dense" if pts.shape[0] <= DENSE_MAX_N else "implicit"
    if mode not in ("dense", "implicit"):
        raise ConfigurationError(f"unknown operator mode {mode!r}")
    op = SpdOperator(pts, sigma2, mode, metric, batch_rows)
    op._ensure_degrees()
    if mode == "dense":
        op.matrix
    return op


def _tiled_product(rows: np.ndarray, V: np.ndarray) -> np.ndarray:
    b = rows.shape[0]
    padded = -(-b // _ROW_TILE) * _ROW_TILE
    if padded != b:
        rows = np.concatenate([rows, np.zeros((padded - b, rows.shape[1]))])
    return (rows @ V)[:b]


def operator_matmul(op: SpdOperator, V, batch_rows: Optional[int] = None) -> np.ndarray:
    """Compute ``W @ V`` for ``V`` of shape ``(N, M)`` (or ``(N,)``).

    Rows of ``W`` are formed (or sliced) ``batch_rows`` at a time.  Results
    are bitwise independent of ``batch_rows`` and agree between dense and
    implicit storage.
    """
    V = np.asarray(V, dtype=np.float64)
    vec = V.ndim == 1
    if vec:
        V = V[:, None]
    if V.ndim != 2 or V.shape[0] != op.size:
        raise ConfigurationError(f"shape mismatch: operator size {op.size}, V shape {V.shape}")
    out = np.empty((op.size, V.shape[1]))
    for a, b in op._blocks(batch_rows):
        rows = op.matrix[a:b] if op.storage == "dense" else op.rows(a, b)
        out[a:b] = _tiled_product(rows, V)
    return out[:, 0] if vec else out
