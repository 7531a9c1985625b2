"""Intrinsic distances between unaligned datasets from log-regularised diffusion spectra.

Typical use::

    from lesdist import PointCloud, RunConfig, compute_descriptor, les_distance

    fa = compute_descriptor(PointCloud(xa, name="a"), RunConfig(k=100))
    fb = compute_descriptor(PointCloud(xb, name="b"), RunConfig(k=100))
    les_distance(fa, fb)
"""
from .analysis import (EmbeddingResult, diffusion_embed, dissimilarity_aggregate,
                       pairwise_distance_matrix, rank_correlation)
from .data import (PointCloud, ToriConfig, generate_torus2, generate_torus3, kernel_scale,
                   kernel_scale_from_points, load_point_cloud, pairwise_sq_dists, save_point_cloud)
from .distances import (DistanceMatrix, LesDescriptor, ai_exact, euclid_exact, imd_approx,
                        le_exact, le_lower_bound, le_upper_bound, les_descriptor, les_distance,
                        loghs_distance, specgw_exact)
from .errors import ConfigurationError, DataError, LesError, NumericalError
from .operator import SpdOperator, build_operator, operator_matmul
from .pipeline import RunConfig, compute_descriptor, compute_spectrum, les_distances
from .spectral import (ErrorBound, Spectrum, approx_eigenvalues, error_bounds, estimate_spectrum,
                       exact_eigenvalues, full_spectrum)

__version__ = "0.1.0"
