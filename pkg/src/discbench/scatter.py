"""Class statistics, between/within scatter matrices, and covariance shrinkage.

The weighted variants normalize sample weights to sum to N before use, so a
uniform weight vector reproduces the unweighted statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureDataset
from .errors import DegenerateClassError, DimensionError
from .numerics import as_matrix


@dataclass(frozen=True)
class ClassStats:
    """Per-class means/counts plus the global mean that generated them."""

    class_means: np.ndarray  # (C, D)
    global_mean: np.ndarray  # (D,)
    class_counts: np.ndarray  # (C,) sample counts
    class_weight_sums: np.ndarray  # (C,) normalized weight mass per class


@dataclass(frozen=True)
class ScatterPair:
    """Between-class and within-class scatter matrices, both D x D."""

    between: np.ndarray
    within: np.ndarray


@dataclass(frozen=True)
class ShrinkageEstimate:
    """Convex combination of a covariance with its scaled-identity target."""

    alpha: float
    shrunk_sw: np.ndarray


def _normalized_weights(dataset: FeatureDataset, weights) -> np.ndarray | None:
    if weights is None:
        return None
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != dataset.n_samples:
        raise ValueError(f"weights must have length {dataset.n_samples}")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if total <= 0:
        raise ValueError("weights must have positive sum")
    return w * (dataset.n_samples / total)


def compute_class_stats(dataset: FeatureDataset, weights=None) -> ClassStats:
    """Class means, counts and weight sums; weighted means use normalized weights."""
    w = _normalized_weights(dataset, weights)
    feats = dataset.features
    c, d = dataset.num_classes, dataset.n_features
    means = np.empty((c, d))
    counts = np.empty(c, dtype=np.int64)
    weight_sums = np.empty(c)
    for cls, idx in enumerate(dataset.class_indices()):
        if idx.size == 0:
            raise DegenerateClassError(f"class {cls} has no samples")
        counts[cls] = idx.size
        if w is None:
            weight_sums[cls] = idx.size
            means[cls] = feats[idx].mean(axis=0)
        else:
            wc = w[idx]
            weight_sums[cls] = wc.sum()
            if weight_sums[cls] <= 0:
                raise DegenerateClassError(f"class {cls} has zero total weight")
            means[cls] = wc @ feats[idx] / weight_sums[cls]
    if w is None:
        global_mean = feats.mean(axis=0)
    else:
        global_mean = w @ feats / w.sum()
    return ClassStats(
        class_means=means,
        global_mean=global_mean,
        class_counts=counts,
        class_weight_sums=weight_sums,
    )


def compute_scatter(
    dataset: FeatureDataset, stats: ClassStats, weights=None
) -> ScatterPair:
    """Between/within scatter sums; the weighted form replaces counts with
    per-class weight mass and scales each sample's outer product by its weight.
    """
    w = _normalized_weights(dataset, weights)
    feats = dataset.features
    if stats.class_means.shape[1] != dataset.n_features:
        raise DimensionError("stats dimensionality does not match dataset")

    mass = stats.class_weight_sums if w is not None else stats.class_counts.astype(float)
    dev = stats.class_means - stats.global_mean
    b_rows = dev * np.sqrt(mass)[:, None]
    between = b_rows.T @ b_rows

    centered = feats - stats.class_means[dataset.labels]
    if w is not None:
        within = (centered * w[:, None]).T @ centered
    else:
        within = centered.T @ centered

    between = (between + between.T) / 2.0
    within = (within + within.T) / 2.0
    return ScatterPair(between=between, within=within)


def within_centered_rows(
    dataset: FeatureDataset, stats: ClassStats, weights=None
) -> np.ndarray:
    """Rows ``x_i - mean(class of i)``, scaled by sqrt(normalized weight).

    The Gram matrix of the result equals the within-class scatter, which is
    what the whitening-based eigensolvers consume.
    """
    w = _normalized_weights(dataset, weights)
    centered = dataset.features - stats.class_means[dataset.labels]
    if w is not None:
        centered = centered * np.sqrt(w)[:, None]
    return centered


def apply_shrinkage(cov: np.ndarray, alpha: float) -> ShrinkageEstimate:
    """Blend ``cov`` with its scaled-identity target at a fixed intensity."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    d = cov.shape[0]
    target = (np.trace(cov) / d) * np.eye(d)
    if alpha == 0.0:
        shrunk = cov.copy()
    elif alpha == 1.0:
        shrunk = target
    else:
        shrunk = (1.0 - alpha) * cov + alpha * target
    return ShrinkageEstimate(alpha=float(alpha), shrunk_sw=shrunk)


def ledoit_wolf_shrink(cov, centered_rows) -> ShrinkageEstimate:
    """Shrink a covariance toward its scaled-identity target.

    ``cov`` is the within-class scatter normalized to a covariance (divided by
    N) and ``centered_rows`` the per-class mean-centered rows it came from.
    The intensity is

        alpha = clip(beta2 / delta2, 0, 1)
        delta2 = ||cov - mu I||_F^2,  mu = trace(cov) / D
        beta2  = (1/N^2) sum_k min(||x_k x_k' - cov||_F^2, N * delta2)

    the per-sample dispersion of the Ledoit-Wolf identity-target estimator,
    capped so beta2 <= delta2. A degenerate target (delta2 == 0) returns
    alpha = 1; shrinking is then a no-op because the target equals ``cov``.
    """
    cov = as_matrix(cov, "covariance")
    rows = np.asarray(centered_rows, dtype=np.float64)
    if rows.ndim != 2:
        raise DimensionError("centered_rows must be 2-D")
    n, d = rows.shape
    if cov.shape != (d, d):
        raise DimensionError(f"covariance shape {cov.shape} does not match D={d}")
    if n == 0:
        raise DegenerateClassError("shrinkage needs at least one sample")

    mu = np.trace(cov) / d
    delta2 = np.sum((cov - mu * np.eye(d)) ** 2)
    if delta2 <= 0.0:
        alpha = 1.0
    else:
        sq_norms = np.einsum("ij,ij->i", rows, rows)
        quad = np.einsum("ij,ij->i", rows @ cov, rows)
        per_sample = sq_norms**2 - 2.0 * quad + np.sum(cov * cov)
        beta2 = np.minimum(per_sample, n * delta2).sum() / (n * n)
        alpha = float(min(1.0, max(0.0, beta2 / delta2)))
    return apply_shrinkage(cov, alpha)
