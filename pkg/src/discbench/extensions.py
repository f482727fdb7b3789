"""Residual-augmented LDA and boosted-reweighting LDA.

Both methods wrap the plain discriminant fit: one appends principal
directions of what LDA's reconstruction misses, the other refits LDA after
upweighting training samples the current projection misclassifies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .data import FeatureDataset
from .errors import CapacityError
from .numerics import solve_spd
from .reducers import Projection, fit_lda, fit_pca, transform

RECONSTRUCTIONS = ("least_squares", "symmetric")


@dataclass(frozen=True)
class RdaConfig:
    """Residual augmentation settings.

    ``residual_components=None`` applies the dimension rule: 20 components
    when D <= 1024, 30 above. ``reconstruction`` picks how the discriminant
    reconstruction is computed; LDA columns are not orthonormal, so the
    least-squares projector W(W'W)^-1 W' is the default and W W' is kept as
    a documented alternative.
    """

    residual_components: int | None = None
    out_dim: int | None = None
    reconstruction: str = "least_squares"

    def __post_init__(self):
        if self.residual_components is not None and self.residual_components < 0:
            raise ValueError("residual_components must be >= 0")
        if self.reconstruction not in RECONSTRUCTIONS:
            raise ValueError(
                f"reconstruction must be one of {RECONSTRUCTIONS}, "
                f"got {self.reconstruction!r}"
            )


@dataclass(frozen=True)
class DsbConfig:
    """Boosting settings: ``rounds`` total LDA fits, misclassified samples
    get their weight multiplied by ``weight_growth`` between rounds."""

    rounds: int = 2
    weight_growth: float = 2.0
    out_dim: int | None = None

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not self.weight_growth > 1.0:
            raise ValueError("weight_growth must be > 1")


def default_residual_components(n_features: int) -> int:
    """Residual component count by feature dimension: 20 up to 1024, else 30."""
    return 20 if n_features <= 1024 else 30


def residual_rows(
    features: np.ndarray, projection: Projection, reconstruction: str
) -> np.ndarray:
    """Centered features minus their reconstruction from the projection span."""
    centered = features - projection.center
    w = projection.weights
    if reconstruction == "least_squares":
        coords = solve_spd(w.T @ w, w.T @ centered.T)
        return centered - coords.T @ w.T
    return centered - centered @ w @ w.T


def fit_rda(train: FeatureDataset, config: RdaConfig | None = None) -> Projection:
    """Discriminant directions plus leading principal directions of the
    reconstruction residuals; output dimension is the LDA dimension plus k.

    The residual block's discriminant_values are the explained residual
    variances, appended after the LDA eigenvalues (each block descending).
    """
    config = config or RdaConfig()
    lda = fit_lda(train, config.out_dim)
    k = config.residual_components
    if k is None:
        k = default_residual_components(train.n_features)
    if k == 0:
        return replace(lda, method_name="rda")

    max_k = min(train.n_features - lda.out_dim, train.n_samples - 1)
    if k > max_k:
        raise CapacityError(
            f"rda supports at most {max_k} residual components for this data, "
            f"got {k}"
        )
    residuals = residual_rows(train.features, lda, config.reconstruction)
    res_pca = fit_pca(residuals, k)
    return Projection(
        weights=np.hstack([lda.weights, res_pca.weights]),
        center=lda.center,
        discriminant_values=np.concatenate(
            [lda.discriminant_values, res_pca.discriminant_values]
        ),
        method_name="rda",
        out_dim=lda.out_dim + k,
    )


def _nearest_centroid_labels(
    projected: np.ndarray, train: FeatureDataset
) -> np.ndarray:
    centroids = np.stack(
        [projected[idx].mean(axis=0) for idx in train.class_indices()]
    )
    sq = (
        np.einsum("ij,ij->i", projected, projected)[:, None]
        - 2.0 * projected @ centroids.T
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
    )
    return sq.argmin(axis=1)


def _run_dsb(
    train: FeatureDataset, config: DsbConfig
) -> tuple[Projection, list[np.ndarray]]:
    """Boosting loop; returns the final projection and the per-round weights.

    Round 1 is the uniform-weight fit (identical to unweighted LDA). Each
    later round classifies training samples by nearest class centroid in the
    current projected space, multiplies misclassified weights by the growth
    factor, renormalizes to sum N, and refits. A round with no mistakes
    leaves the weights and projection unchanged.
    """
    n = train.n_samples
    weights = np.ones(n)
    history = [weights.copy()]
    projection = fit_lda(train, config.out_dim)
    for _ in range(1, config.rounds):
        predicted = _nearest_centroid_labels(
            transform(projection, train.features), train
        )
        wrong = predicted != train.labels
        if not wrong.any():
            history.append(weights.copy())
            continue
        weights = weights * np.where(wrong, config.weight_growth, 1.0)
        weights = weights * (n / weights.sum())
        history.append(weights.copy())
        projection = fit_lda(train, config.out_dim, weights=weights)
    return replace(projection, method_name="dsb"), history


def fit_dsb(train: FeatureDataset, config: DsbConfig | None = None) -> Projection:
    """Reweighted-refit LDA; the last round's projection is returned."""
    projection, _ = _run_dsb(train, config or DsbConfig())
    return projection
