"""Multinomial logistic regression head with l2 weight penalty.

The objective is

    J(W, b) = sum_i -log softmax(W' x_i + b)[y_i] + ||W||_F^2 / (2 reg_c)

with the bias unpenalized and no 1/N scaling, so ``reg_c`` means the same
thing as the usual inverse-regularization C. The objective is convex; zero
initialization plus a deterministic quasi-Newton minimizer makes training a
pure function of its inputs (the seed argument is accepted but unused).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from .errors import DimensionError, NumericError
from .numerics import as_matrix


@dataclass(frozen=True)
class ClassifierModel:
    weights: np.ndarray  # (d, C)
    bias: np.ndarray  # (C,)
    reg_c: float
    converged: bool
    iterations_used: int


def logistic_objective(
    weights: np.ndarray,
    bias: np.ndarray,
    features: np.ndarray,
    labels: np.ndarray,
    reg_c: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Objective value and its gradients in (weights, bias)."""
    scores = features @ weights + bias
    log_norm = logsumexp(scores, axis=1)
    rows = np.arange(features.shape[0])
    value = float(
        (log_norm - scores[rows, labels]).sum()
        + (weights * weights).sum() / (2.0 * reg_c)
    )
    probs = np.exp(scores - log_norm[:, None])
    probs[rows, labels] -= 1.0
    grad_w = features.T @ probs + weights / reg_c
    grad_b = probs.sum(axis=0)
    return value, grad_w, grad_b


def train_classifier(
    features,
    labels,
    reg_c: float = 1.0,
    max_iter: int = 5000,
    tol: float = 1e-6,
    seed: int = 0,
) -> ClassifierModel:
    """Minimize the regularized cross-entropy with limited-memory BFGS.

    Stops when the gradient infinity norm drops to ``tol`` or after
    ``max_iter`` iterations. Inputs are expected standardized (not enforced).
    """
    del seed  # convex objective, zero init: training is deterministic
    feats = as_matrix(features, "features")
    y = np.asarray(labels)
    if y.ndim != 1 or y.shape[0] != feats.shape[0]:
        raise ValueError("labels must be one per feature row")
    if y.size == 0 or y.min() < 0:
        raise ValueError("labels must be non-negative integers")
    num_classes = int(y.max()) + 1
    if np.unique(y).size != num_classes:
        raise ValueError("every class in [0, max_label] must be present")
    if reg_c <= 0:
        raise ValueError("reg_c must be positive")
    y = y.astype(np.int64)
    dim = feats.shape[1]

    def fun(params):
        w = params[: dim * num_classes].reshape(dim, num_classes)
        b = params[dim * num_classes :]
        value, grad_w, grad_b = logistic_objective(w, b, feats, y, reg_c)
        if not np.isfinite(value):
            raise NumericError("classifier loss is not finite")
        return value, np.concatenate([grad_w.ravel(), grad_b])

    result = minimize(
        fun,
        np.zeros(dim * num_classes + num_classes),
        jac=True,
        method="L-BFGS-B",
        options={
            "maxiter": max_iter,
            "maxfun": max(15000, 50 * max_iter),
            "gtol": tol,
            "ftol": 1e-15,
        },
    )
    params = result.x
    return ClassifierModel(
        weights=params[: dim * num_classes].reshape(dim, num_classes).copy(),
        bias=params[dim * num_classes :].copy(),
        reg_c=reg_c,
        converged=bool(result.success),
        iterations_used=int(result.nit),
    )


def predict(model: ClassifierModel, features) -> np.ndarray:
    """Argmax class scores; ties go to the lowest class index."""
    feats = as_matrix(features, "features")
    if feats.shape[1] != model.weights.shape[0]:
        raise DimensionError(
            f"features have {feats.shape[1]} columns, model expects "
            f"{model.weights.shape[0]}"
        )
    return np.argmax(feats @ model.weights + model.bias, axis=1)


def accuracy(predicted, actual) -> float:
    """Exact-match fraction."""
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape or p.ndim != 1:
        raise ValueError("predicted and actual must be 1-D of equal length")
    if p.size == 0:
        raise ValueError("empty label vectors")
    return float(np.mean(p == a))
