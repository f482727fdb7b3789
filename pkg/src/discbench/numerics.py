"""Dense matrix conventions and the decompositions the rest of the library uses.

A "matrix" throughout this package is a 2-D, C-contiguous (row-major)
``float64`` ndarray with finite entries. ``as_matrix`` coerces and validates;
the decomposition routines delegate to LAPACK via numpy but own the ordering
and validation contracts:

* eigen/singular values are always returned in descending order,
* ties keep the backend's output order,
* every public result is checked finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericError, SingularMatrixError

SYMMETRY_RTOL = 1e-9


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a validated 2-D float64 row-major array."""
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericError(f"{name} contains NaN or Inf entries")
    return m


def check_symmetric(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Require a square matrix symmetric within relative tolerance."""
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > SYMMETRY_RTOL * scale:
        raise DimensionError(f"{name} is not symmetric within rtol={SYMMETRY_RTOL}")
    return m


@dataclass(frozen=True)
class SymEigResult:
    """Eigenpairs of a symmetric matrix, eigenvalues descending."""

    eigenvalues: np.ndarray  # (n,)
    eigenvectors: np.ndarray  # (n, n), one column per eigenvalue


def sym_eig(m) -> SymEigResult:
    """Full eigendecomposition of a symmetric matrix, descending eigenvalues."""
    m = check_symmetric(as_matrix(m, "sym_eig input"), "sym_eig input")
    vals, vecs = np.linalg.eigh(m)
    order = np.arange(vals.size)[::-1]  # eigh is ascending; reverse preserves tie order
    vals = np.ascontiguousarray(vals[order])
    vecs = np.ascontiguousarray(vecs[:, order])
    if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(vecs))):
        raise NumericError("eigendecomposition produced non-finite values")
    return SymEigResult(vals, vecs)


def thin_svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U @ diag(s) @ Vt`` with singular values descending."""
    m = as_matrix(m, "thin_svd input")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    if not np.all(np.isfinite(s)):
        raise NumericError("SVD produced non-finite singular values")
    return np.ascontiguousarray(u), s, np.ascontiguousarray(vt)


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` for symmetric positive-definite ``a``.

    Raises SingularMatrixError when the Cholesky factorization fails, so
    callers can fall back to a pseudo-inverse route.
    """
    a = check_symmetric(as_matrix(a, "solve_spd lhs"), "solve_spd lhs")
    b = np.asarray(b, dtype=np.float64)
    vec_input = b.ndim == 1
    if vec_input:
        b = b[:, None]
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"rhs rows {b.shape[0]} do not match lhs size {a.shape[0]}"
        )
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("matrix is not positive definite") from exc
    y = np.linalg.solve(chol, b)
    x = np.linalg.solve(chol.T, y)
    if not np.all(np.isfinite(x)):
        raise NumericError("solve produced non-finite values")
    return x[:, 0] if vec_input else x
