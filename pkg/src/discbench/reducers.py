"""Linear projection methods sharing one fit/transform interface.

Every fit returns a ``Projection``: subtract ``center``, multiply by
``weights``. Discriminant-style methods (lda, pca_lda, rlda, lfda) solve a
generalized eigenproblem by whitening the within matrix with a truncated
decomposition (singular directions below RANK_RTOL times the largest are
dropped), then eigendecomposing the whitened between matrix. Projection
columns have deterministic signs: the entry of largest magnitude is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .data import FeatureDataset
from .errors import (
    CapacityError,
    DegenerateClassError,
    DimensionError,
    NumericError,
    RankCollapseError,
)
from .numerics import as_matrix, sym_eig, thin_svd
from .scatter import (
    apply_shrinkage,
    compute_class_stats,
    ledoit_wolf_shrink,
    within_centered_rows,
)

RANK_RTOL = 1e-10
PSD_TOL = 1e-8

METHODS = ("full", "pca", "lda", "pca_lda", "rlda", "lfda", "nca")
LDA_FAMILY = ("lda", "pca_lda", "rlda", "lfda")


@dataclass(frozen=True)
class Projection:
    """Fitted linear map: rows are projected as ``(x - center) @ weights``."""

    weights: np.ndarray  # (D, d)
    center: np.ndarray  # (D,)
    discriminant_values: np.ndarray  # (d,) objective values, descending
    method_name: str
    out_dim: int

    def __post_init__(self):
        if self.weights.shape[1] != self.out_dim:
            raise DimensionError("out_dim does not match weight columns")


@dataclass(frozen=True)
class ReducerConfig:
    """Which method to fit and with what knobs; ``out_dim=None`` means the
    method's maximum (C - 1 for the discriminant family)."""

    method: str
    out_dim: int | None = None
    lfda_neighbors: int = 7
    nca_max_iter: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}, expected one of {METHODS}"
            )
        if self.out_dim is not None and self.out_dim < 1:
            raise ValueError("out_dim must be >= 1")
        if self.lfda_neighbors < 1:
            raise ValueError("lfda_neighbors must be >= 1")


def transform(projection: Projection, features) -> np.ndarray:
    """Apply a fitted projection to a feature matrix."""
    feats = as_matrix(features, "features")
    if feats.shape[1] != projection.weights.shape[0]:
        raise DimensionError(
            f"features have {feats.shape[1]} columns, projection expects "
            f"{projection.weights.shape[0]}"
        )
    return (feats - projection.center) @ projection.weights


def fit(config: ReducerConfig, train: FeatureDataset) -> Projection:
    """Fit the configured method on training data."""
    if config.method == "full":
        d = train.n_features
        return Projection(
            weights=np.eye(d),
            center=np.zeros(d),
            discriminant_values=np.ones(d),
            method_name="full",
            out_dim=d,
        )
    if config.method == "pca":
        return fit_pca(train.features, config.out_dim)
    if config.method == "lda":
        return fit_lda(train, config.out_dim)
    if config.method == "pca_lda":
        return fit_pca_lda(train, config.out_dim)
    if config.method == "rlda":
        return fit_rlda(train, config.out_dim)
    if config.method == "lfda":
        return fit_lfda(train, config.out_dim, config.lfda_neighbors)
    return fit_nca(train, config.out_dim, config.nca_max_iter, config.seed)


def _fix_signs(w: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    lead = np.abs(w).argmax(axis=0)
    signs = np.sign(w[lead, np.arange(w.shape[1])])
    signs[signs == 0] = 1.0
    return w * signs


def _require_min_class_size(train: FeatureDataset, minimum: int) -> None:
    counts = np.bincount(train.labels, minlength=train.num_classes)
    small = np.flatnonzero(counts < minimum)
    if small.size:
        raise DegenerateClassError(
            f"classes {small.tolist()} have fewer than {minimum} samples"
        )


def _resolve_dim(requested: int | None, cap: int, available: int, method: str) -> int:
    if requested is None:
        return min(cap, available)
    if requested > cap:
        raise CapacityError(f"{method} supports at most {cap} components")
    if requested > available:
        raise CapacityError(
            f"{method} can extract only {available} components from this data "
            f"(rank limited), {requested} requested"
        )
    return requested


def _whiten_from_rows(rows: np.ndarray) -> np.ndarray:
    """Map whose columns whiten the Gram matrix of ``rows``; rank-truncated."""
    _, s, vt = thin_svd(rows)
    keep = s > RANK_RTOL * s[0]
    if not np.any(keep):
        raise RankCollapseError("within-class matrix has no usable directions")
    return (vt[keep] / s[keep][:, None]).T


def _whiten_from_spd(m: np.ndarray) -> np.ndarray:
    """Whitening map from an eigendecomposition of a PSD matrix."""
    eig = sym_eig(m)
    top = eig.eigenvalues[0]
    if top <= 0:
        raise RankCollapseError("within matrix has no positive eigenvalues")
    if eig.eigenvalues[-1] < -PSD_TOL * top:
        raise NumericError("within matrix is not positive semi-definite")
    keep = eig.eigenvalues > RANK_RTOL * top
    return eig.eigenvectors[:, keep] / np.sqrt(eig.eigenvalues[keep])


def _fisher_projection(
    between_rows: np.ndarray,
    whiten: np.ndarray,
    center: np.ndarray,
    d: int | None,
    num_classes: int,
    method: str,
) -> Projection:
    """Top discriminant directions given sqrt-weighted between rows and a
    whitening map for the within matrix."""
    bw = between_rows @ whiten
    m = bw.T @ bw
    m = (m + m.T) / 2.0
    eig = sym_eig(m)
    d = _resolve_dim(d, num_classes - 1, whiten.shape[1], method)
    values = np.clip(eig.eigenvalues[:d], 0.0, None)
    weights = _fix_signs(whiten @ eig.eigenvectors[:, :d])
    return Projection(
        weights=weights,
        center=center,
        discriminant_values=values,
        method_name=method,
        out_dim=d,
    )


def fit_pca(train_features, d: int | None = None) -> Projection:
    """Principal components of the feature covariance (population, 1/N)."""
    feats = as_matrix(train_features, "features")
    n = feats.shape[0]
    available = min(n - 1, feats.shape[1])
    if d is None:
        d = available
    if d < 1 or d > available:
        raise CapacityError(
            f"pca supports 1..{available} components for this data, got {d}"
        )
    center = feats.mean(axis=0)
    _, s, vt = thin_svd(feats - center)
    weights = _fix_signs(vt[:d].T)
    return Projection(
        weights=weights,
        center=center,
        discriminant_values=s[:d] ** 2 / n,
        method_name="pca",
        out_dim=d,
    )


def fit_lda(
    train: FeatureDataset, d: int | None = None, weights=None
) -> Projection:
    """Fisher discriminant directions; ``weights`` enables the boosted variant."""
    _require_min_class_size(train, 2)
    stats = compute_class_stats(train, weights)
    mass = (
        stats.class_weight_sums
        if weights is not None
        else stats.class_counts.astype(float)
    )
    between_rows = (stats.class_means - stats.global_mean) * np.sqrt(mass)[:, None]
    whiten = _whiten_from_rows(within_centered_rows(train, stats, weights))
    return _fisher_projection(
        between_rows, whiten, stats.global_mean, d, train.num_classes, "lda"
    )


def fit_pca_lda(train: FeatureDataset, d: int | None = None) -> Projection:
    """PCA down to C - 1 dimensions, then LDA in the reduced space."""
    inter = min(train.num_classes - 1, train.n_features, train.n_samples - 1)
    pca = fit_pca(train.features, inter)
    reduced = FeatureDataset(
        features=transform(pca, train.features),
        labels=train.labels,
        num_classes=train.num_classes,
        backbone_name=train.backbone_name,
        dataset_name=train.dataset_name,
    )
    lda = fit_lda(reduced, d)
    # exact composition: fold the inner center through the orthonormal PCA map
    center = pca.center + pca.weights @ lda.center
    return Projection(
        weights=pca.weights @ lda.weights,
        center=center,
        discriminant_values=lda.discriminant_values,
        method_name="pca_lda",
        out_dim=lda.out_dim,
    )


def fit_rlda(
    train: FeatureDataset, d: int | None = None, alpha: float | None = None
) -> Projection:
    """LDA with the within covariance shrunk toward its scaled-identity target.

    ``alpha=None`` estimates the intensity with the Ledoit-Wolf rule; a fixed
    value in [0, 1] overrides it.
    """
    _require_min_class_size(train, 2)
    stats = compute_class_stats(train)
    between_rows = (stats.class_means - stats.global_mean) * np.sqrt(
        stats.class_counts.astype(float)
    )[:, None]
    rows = within_centered_rows(train, stats)
    cov = rows.T @ rows / train.n_samples
    cov = (cov + cov.T) / 2.0
    est = ledoit_wolf_shrink(cov, rows) if alpha is None else apply_shrinkage(cov, alpha)
    whiten = _whiten_from_spd(est.shrunk_sw)
    return _fisher_projection(
        between_rows, whiten, stats.global_mean, d, train.num_classes, "rlda"
    )


def _local_scatter_pair(
    train: FeatureDataset, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Affinity-localized between/within scatter matrices.

    Same-class pairs get affinity ``exp(-||zi - zj||^2 / (sigma_i sigma_j))``
    with sigma_i the distance to the k-th same-class neighbor (k truncated to
    n_c - 1 per class). Pair weights: within ``A/n_c``; between
    ``A (1/N - 1/n_c)`` for same-class pairs and ``1/N`` otherwise. The
    different-class mass is folded in analytically as the total scatter, so
    only per-class blocks are ever materialized.
    """
    feats = train.features
    n = train.n_samples
    centered = feats - feats.mean(axis=0)
    total = centered.T @ centered

    within = np.zeros_like(total)
    correction = np.zeros_like(total)
    for cls, idx in enumerate(train.class_indices()):
        if idx.size < 2:
            raise DegenerateClassError(f"class {cls} needs at least 2 samples")
        xc = feats[idx]
        nc = idx.size
        sq = np.maximum(
            np.add.outer(
                np.einsum("ij,ij->i", xc, xc), np.einsum("ij,ij->i", xc, xc)
            )
            - 2.0 * (xc @ xc.T),
            0.0,
        )
        kc = min(k, nc - 1)
        sigma = np.sqrt(np.partition(sq, kc, axis=1)[:, kc])
        scale = np.outer(sigma, sigma)
        with np.errstate(divide="ignore", invalid="ignore"):
            affinity = np.exp(-sq / scale)
        affinity[scale == 0] = 0.0

        w_within = affinity / nc
        w_corr = 1.0 / n - affinity * (1.0 / n - 1.0 / nc)
        for w_block, acc in ((w_within, within), (w_corr, correction)):
            rowsum = w_block.sum(axis=1)
            acc += xc.T @ (rowsum[:, None] * xc) - xc.T @ w_block @ xc

    between = total - correction
    between = (between + between.T) / 2.0
    within = (within + within.T) / 2.0
    return between, within


def fit_lfda(
    train: FeatureDataset, d: int | None = None, k: int = 7
) -> Projection:
    """Locality-preserving discriminant directions (affinity-weighted scatter)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    between, within = _local_scatter_pair(train, k)
    whiten = _whiten_from_spd(within)
    bw = whiten.T @ between @ whiten
    bw = (bw + bw.T) / 2.0
    eig = sym_eig(bw)
    d = _resolve_dim(d, train.num_classes - 1, whiten.shape[1], "lfda")
    values = np.clip(eig.eigenvalues[:d], 0.0, None)
    weights = _fix_signs(whiten @ eig.eigenvectors[:, :d])
    return Projection(
        weights=weights,
        center=train.features.mean(axis=0),
        discriminant_values=values,
        method_name="lfda",
        out_dim=d,
    )


def nca_objective(a: np.ndarray, feats: np.ndarray, same: np.ndarray):
    """Stochastic-neighbor objective ``sum_i p_i`` and its gradient in ``a``.

    ``a`` maps rows as ``x @ a.T``; ``same[i, j]`` marks label agreement.
    ``p_ij`` is the softmax over negated squared embedding distances (j != i)
    and ``p_i`` the probability mass on same-class neighbors.
    """
    emb = feats @ a.T
    sq_norms = np.einsum("ij,ij->i", emb, emb)
    sq = np.maximum(sq_norms[:, None] + sq_norms[None, :] - 2.0 * (emb @ emb.T), 0.0)
    np.fill_diagonal(sq, np.inf)
    log_p = -sq - logsumexp(-sq, axis=1)[:, None]
    p = np.exp(log_p)
    p_i = (p * same).sum(axis=1)
    objective = p_i.sum()

    weighted = p * same - p * p_i[:, None]
    w_sym = weighted + weighted.T
    np.fill_diagonal(w_sym, -weighted.sum(axis=0))
    grad = 2.0 * (emb.T @ w_sym) @ feats
    return objective, grad


def fit_nca(
    train: FeatureDataset,
    d: int | None = None,
    max_iter: int = 50,
    seed: int = 0,
) -> Projection:
    """Gradient ascent on the stochastic neighbor objective.

    Starts from the top-d principal directions, takes fixed steps of 0.01 and
    halves the rate whenever a step would decrease the objective. Stops at
    ``max_iter`` evaluations or when the gradient infinity norm drops below
    1e-5. Deterministic given the data; ``seed`` is accepted for interface
    uniformity.
    """
    del seed  # PCA initialization makes the fit deterministic
    _require_min_class_size(train, 2)
    feats = train.features
    available = min(train.n_samples - 1, train.n_features)
    if d is None:
        d = available
    if d < 1 or d > available:
        raise CapacityError(
            f"nca supports 1..{available} components for this data, got {d}"
        )
    center = feats.mean(axis=0)
    a = fit_pca(feats, d).weights.T.copy()
    same = train.labels[:, None] == train.labels[None, :]

    lr = 0.01
    value, grad = nca_objective(a, feats, same)
    if not np.isfinite(value):
        raise NumericError(
            "nca objective is not finite; standardize features before fitting"
        )
    for _ in range(max_iter):
        if np.abs(grad).max() < 1e-5 or lr < 1e-15:
            break
        candidate = a + lr * grad
        cand_value, cand_grad = nca_objective(candidate, feats, same)
        if not np.isfinite(cand_value):
            raise NumericError(
                "nca objective overflowed; standardize features before fitting"
            )
        if cand_value < value:
            lr /= 2.0
        else:
            a, value, grad = candidate, cand_value, cand_grad

    norms = np.linalg.norm(a, axis=1)
    order = np.argsort(-norms, kind="stable")
    weights = _fix_signs(a[order].T)
    return Projection(
        weights=weights,
        center=center,
        discriminant_values=norms[order],
        method_name="nca",
        out_dim=d,
    )
