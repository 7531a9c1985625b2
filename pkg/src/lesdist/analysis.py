"""Analysis of dataset collections: distance matrices, embeddings, correlations."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy import linalg

from .distances import DistanceMatrix, LesDescriptor, check_comparable, imd_approx
from .errors import ConfigurationError, DataError


@dataclass(frozen=True)
class EmbeddingResult:
    """Diffusion-map coordinates of a distance matrix.

    ``coords[:, i]`` is the ``i``-th nontrivial coordinate scaled by its
    eigenvalue ``eigvals[i]``; columns are ordered by decreasing eigenvalue.
    """

    coords: np.ndarray
    eigvals: np.ndarray
    kernel_scale: float
    labels: tuple = ()

    def to_csv(self) -> str:
        m = self.coords.shape[1]
        lines = ["label," + ",".join(f"f{i + 1}" for i in range(m))]
        for lab, row in zip(self.labels, self.coords):
            lines.append(f"{lab}," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"labels": list(self.labels), "eigvals": self.eigvals.tolist(),
                           "kernel_scale": self.kernel_scale, "coords": self.coords.tolist()},
                          indent=1) + "\n"


def pairwise_distance_matrix(descriptors: Sequence[LesDescriptor],
                             method: Literal["les", "imd_approx"] = "les",
                             t_grid=None) -> DistanceMatrix:
    """All pairwise distances between descriptors.

    ``"les"`` compares the signatures directly; ``"imd_approx"`` compares
    the heat traces of the eigenvalues recovered from each signature.
    """
    r = len(descriptors)
    if r < 2:
        raise ConfigurationError("need at least two descriptors")
    for d in descriptors[1:]:
        check_comparable(descriptors[0], d)
    D = np.zeros((r, r))
    if method == "les":
        F = np.stack([d.f for d in descriptors])
        for i in range(r):
            diff = F[i + 1:] - F[i]
            D[i, i + 1:] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    elif method in ("imd_approx", "imd"):
        lams = [d.eigenvalues for d in descriptors]
        for i in range(r):
            for j in range(i + 1, r):
                D[i, j] = imd_approx(lams[i], lams[j], t_grid=t_grid)
        method = "imd_approx"
    else:
        raise ConfigurationError(f"unknown distance method {method!r}")
    D = D + D.T
    return DistanceMatrix(D, method, tuple(d.dataset_name for d in descriptors))


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    mags = np.abs(vecs)
    # near-ties (symmetric configurations) resolve to the lowest row index
    idx = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def diffusion_embed(D, m: int = 2, scale_multiplier: float = 1.0) -> EmbeddingResult:
    """Diffusion-maps embedding of a distance matrix.

    A Gaussian kernel with ``sigma^2 = scale_multiplier * median`` of the
    squared off-diagonal distances is density-normalised and row-normalised
    the same way as the point-cloud operator.  The returned coordinates are
    the right eigenvectors ``2 .. m+1`` of the row-stochastic matrix, each
    multiplied by its eigenvalue.  Each coordinate's sign is fixed so that
    its largest-magnitude entry is positive.
    """
    if isinstance(D, DistanceMatrix):
        vals, labels = D.values, D.labels
    else:
        vals = np.asarray(D, dtype=np.float64)
        labels = tuple(f"d{i}" for i in range(vals.shape[0]))
    r = vals.shape[0]
    if m < 1 or r < m + 2:
        raise ConfigurationError(f"need r >= m + 2, got r={r}, m={m}")
    off = vals[np.triu_indices(r, k=1)] ** 2
    if not (off > 0).any():
        raise DataError("degenerate distances: all pairwise distances are zero")
    sigma2 = scale_multiplier * float(np.median(off))
    K = np.exp(-vals ** 2 / sigma2)
    dt = K.sum(axis=1)
    Wt = K / np.outer(dt, dt)
    d = Wt.sum(axis=1)
    S = Wt / np.sqrt(np.outer(d, d))
    ev, phi = linalg.eigh(0.5 * (S + S.T))
    order = np.argsort(-ev, kind="stable")
    ev, phi = ev[order], phi[:, order]
    psi = phi / np.sqrt(d)[:, None]
    psi = psi / np.linalg.norm(psi, axis=0)
    coords = _fix_signs(psi[:, 1:m + 1]) * ev[1:m + 1]
    return EmbeddingResult(coords, ev[1:m + 1].copy(), sigma2, labels)


def rank_correlation(values, reference, kind: Literal["pearson"] = "pearson") -> float:
    """Pearson correlation coefficient between two equally long vectors."""
    if kind != "pearson":
        raise ConfigurationError(f"unsupported correlation {kind!r}")
    x = np.asarray(values, dtype=np.float64).ravel()
    y = np.asarray(reference, dtype=np.float64).ravel()
    if x.size != y.size or x.size < 3:
        raise ConfigurationError("need two vectors of equal length >= 3")
    xc, yc = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(xc @ xc), np.sqrt(yc @ yc)
    if sx == 0 or sy == 0:
        raise DataError("zero variance: correlation undefined")
    return float(np.clip((xc @ yc) / (sx * sy), -1.0, 1.0))


def dissimilarity_aggregate(d_list, agg: Literal["mean", "min", "max"] = "mean") -> float:
    """Aggregate the distances of one dataset to a collection."""
    d = np.asarray(d_list, dtype=np.float64).ravel()
    if d.size == 0:
        raise ConfigurationError("cannot aggregate an empty list")
    funcs = {"mean": np.mean, "min": np.min, "max": np.max}
    if agg not in funcs:
        raise ConfigurationError(f"unknown aggregate {agg!r}")
    return float(funcs[agg](d))
