"""Shared oracle implementations and dataset builders for the test suite.

Everything here is deliberately naive: per-sample loops, explicit sums, and
recursive enumerations that are slow but obviously correct, so the fast
library paths have something independent to be checked against.
"""

from __future__ import annotations

import numpy as np

from discbench.data import FeatureDataset


def make_random_dataset(
    rng: np.random.Generator,
    num_classes: int,
    min_per_class: int,
    max_per_class: int,
    dim: int,
    scale: float = 1.0,
    spread: float = 1.0,
) -> FeatureDataset:
    """Random class clouds with guaranteed per-class minimum counts."""
    counts = rng.integers(min_per_class, max_per_class + 1, size=num_classes)
    labels = np.repeat(np.arange(num_classes, dtype=np.int64), counts)
    centers = rng.normal(scale=spread, size=(num_classes, dim))
    features = centers[labels] + rng.normal(scale=scale, size=(labels.size, dim))
    return FeatureDataset(
        features=features, labels=labels, num_classes=num_classes
    )


def naive_scatter(dataset: FeatureDataset, weights=None):
    """Double-loop between/within scatter straight from the definitions."""
    n, dim = dataset.features.shape
    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=np.float64)
        w = w * (n / w.sum())
    class_means = np.zeros((dataset.num_classes, dim))
    class_mass = np.zeros(dataset.num_classes)
    for i in range(n):
        class_means[dataset.labels[i]] += w[i] * dataset.features[i]
        class_mass[dataset.labels[i]] += w[i]
    for c in range(dataset.num_classes):
        class_means[c] /= class_mass[c]
    global_mean = np.zeros(dim)
    for i in range(n):
        global_mean += w[i] * dataset.features[i]
    global_mean /= w.sum()

    s_b = np.zeros((dim, dim))
    for c in range(dataset.num_classes):
        dev = class_means[c] - global_mean
        s_b += class_mass[c] * np.outer(dev, dev)
    s_w = np.zeros((dim, dim))
    for i in range(n):
        dev = dataset.features[i] - class_means[dataset.labels[i]]
        s_w += w[i] * np.outer(dev, dev)
    return s_b, s_w


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Angles (radians) between the column spans of two matrices."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    sigma = np.linalg.svd(qa.T @ qb, compute_uv=False)
    return np.arccos(np.clip(sigma, -1.0, 1.0))


def fisher_ratio(direction: np.ndarray, s_b: np.ndarray, s_w: np.ndarray) -> float:
    return float((direction @ s_b @ direction) / (direction @ s_w @ direction))


def wilcoxon_recursive_p(deltas: np.ndarray) -> float:
    """Exact two-sided signed-rank p by recursive counting over sign flips."""
    deltas = np.asarray(deltas, dtype=np.float64)
    deltas = deltas[deltas != 0.0]
    n = deltas.size
    if n == 0:
        return 1.0
    magnitudes = np.abs(deltas)
    order = np.argsort(magnitudes, kind="stable")
    ranks = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and magnitudes[order[j + 1]] == magnitudes[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    doubled = np.rint(2.0 * ranks).astype(int)
    total = int(doubled.sum())
    observed_dev = abs(2 * int(np.rint(2.0 * ranks[deltas > 0].sum())) - total)

    def count(index: int, acc: int) -> int:
        if index == n:
            return 1 if abs(2 * acc - total) >= observed_dev else 0
        return count(index + 1, acc + doubled[index]) + count(index + 1, acc)

    return count(0, 0) / float(2**n)
