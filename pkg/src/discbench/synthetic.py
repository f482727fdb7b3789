"""Synthetic Gaussian class clouds for tests and runnable demos.

Shared-covariance Gaussians are the regime where the linear discriminant is
Bayes-optimal, which makes them the right ground truth for end-to-end checks:
the achievable accuracy is computable by Monte Carlo integration.
"""

from __future__ import annotations

import numpy as np

from .data import FeatureDataset
from .numerics import as_matrix, solve_spd


def make_gaussian_dataset(
    num_classes: int,
    samples_per_class: int,
    dim: int,
    mean_scale: float = 1.0,
    seed: int = 0,
    means=None,
    covariance=None,
    backbone_name: str = "synthetic",
    dataset_name: str = "gaussian",
) -> FeatureDataset:
    """Equal-sized classes drawn from N(mu_c, Sigma) with shared Sigma.

    ``means`` (C x dim) and ``covariance`` (dim x dim, SPD) override the
    defaults of N(0, mean_scale^2) class centers and identity covariance.
    Pass the same ``means``/``covariance`` with different seeds to get
    matched train/test splits from one population.
    """
    if num_classes < 1 or samples_per_class < 1 or dim < 1:
        raise ValueError("num_classes, samples_per_class, dim must be >= 1")
    rng = np.random.default_rng(seed)
    if means is None:
        means = rng.normal(scale=mean_scale, size=(num_classes, dim))
    else:
        means = as_matrix(means, "means")
        if means.shape != (num_classes, dim):
            raise ValueError(f"means must have shape {(num_classes, dim)}")
    labels = np.repeat(np.arange(num_classes, dtype=np.int64), samples_per_class)
    noise = rng.standard_normal((labels.size, dim))
    if covariance is not None:
        noise = noise @ np.linalg.cholesky(as_matrix(covariance, "covariance")).T
    return FeatureDataset(
        features=means[labels] + noise,
        labels=labels,
        num_classes=num_classes,
        backbone_name=backbone_name,
        dataset_name=dataset_name,
    )


def bayes_accuracy(
    means, covariance=None, num_samples: int = 200_000, seed: int = 0
) -> float:
    """Monte Carlo estimate of the Bayes rate for an equal-prior
    shared-covariance Gaussian mixture (the optimal rule is linear)."""
    means = as_matrix(means, "means")
    num_classes, dim = means.shape
    if covariance is None:
        covariance = np.eye(dim)
    else:
        covariance = as_matrix(covariance, "covariance")
    # linear discriminant scores: a_c . x - 0.5 mu_c . a_c with a_c = Sigma^-1 mu_c
    a = solve_spd(covariance, means.T)  # dim x C
    offsets = 0.5 * np.einsum("ij,ji->i", means, a)

    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(covariance)
    labels = rng.integers(num_classes, size=num_samples)
    x = means[labels] + rng.standard_normal((num_samples, dim)) @ chol.T
    predicted = np.argmax(x @ a - offsets, axis=1)
    return float(np.mean(predicted == labels))
