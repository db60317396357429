"""Dense symmetric positive-definite kernels for small information matrices.

Everything the design criteria need reduces to a Cholesky factor ``L`` of
``M = L L^T``: log-determinants, inverses, traces of inverses and the
quadratic forms ``v^T M^{-1} v`` / ``v^T M^{-2} v`` evaluated per candidate.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

__all__ = [
    "PIVOT_FLOOR",
    "NotPositiveDefinite",
    "CholeskyFactor",
    "symmetrize",
    "cholesky",
    "log_det",
    "inverse_spd",
    "trace_inverse",
    "quad_form",
    "quad_form_squared",
    "quad_forms",
    "quad_forms_squared",
]

PIVOT_FLOOR = 1e-12


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot falls below the relative pivot floor."""


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor ``lower`` with ``lower @ lower.T == M``."""

    lower: np.ndarray

    @property
    def dim(self):
        return self.lower.shape[0]

    def reconstruct(self):
        return self.lower @ self.lower.T


def symmetrize(m):
    """Return ``m`` with exactly symmetric storage (mean of m and m^T)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return 0.5 * (m + m.T)


def cholesky(m):
    """Factor a symmetric matrix, rejecting near-singular pivots.

    Parameters
    ----------
    m : array_like (p, p)
        Symmetric matrix. Only exact symmetry up to rounding is assumed; the
        lower triangle is what LAPACK reads.

    Returns
    -------
    CholeskyFactor

    Raises
    ------
    NotPositiveDefinite
        If any squared pivot is at most ``PIVOT_FLOOR * max(diag(m))``, or the
        matrix is not positive definite at all.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    scale = float(np.max(np.diag(m)))
    if scale <= 0.0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    try:
        lower = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(lower) ** 2
    if np.min(pivots) <= PIVOT_FLOOR * scale:
        k = int(np.argmin(pivots))
        raise NotPositiveDefinite(
            f"pivot {k} = {pivots[k]:.3e} below floor {PIVOT_FLOOR * scale:.3e}"
        )
    return CholeskyFactor(lower)


def log_det(f):
    """``log |M|`` from the factor, i.e. twice the sum of log pivots."""
    return 2.0 * float(np.sum(np.log(np.diag(f.lower))))


def _inverse_lower(f):
    return solve_triangular(f.lower, np.eye(f.dim), lower=True)


def inverse_spd(f):
    """Explicit symmetric inverse ``M^{-1} = L^{-T} L^{-1}``."""
    linv = _inverse_lower(f)
    return symmetrize(linv.T @ linv)


def trace_inverse(f):
    """``tr(M^{-1})``, the squared Frobenius norm of ``L^{-1}``."""
    linv = _inverse_lower(f)
    return float(np.sum(linv * linv))


def _check_vector(m, v):
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != m.shape[0]:
        raise ValueError(f"vector of shape {v.shape} does not match matrix {m.shape}")
    return m, v


def quad_form(m, v):
    """``v^T m v``."""
    m, v = _check_vector(m, v)
    return float(v @ m @ v)


def quad_form_squared(m, v):
    """``v^T m^2 v = ||m v||^2`` for symmetric ``m``."""
    m, v = _check_vector(m, v)
    mv = m @ v
    return float(mv @ mv)


def _check_rows(m, rows):
    m = np.asarray(m, dtype=float)
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != m.shape[0]:
        raise ValueError(f"rows of shape {rows.shape} do not match matrix {m.shape}")
    return m, rows


def quad_forms(m, rows):
    """Row-wise ``f_i^T m f_i`` for every row of ``rows`` (N, p)."""
    m, rows = _check_rows(m, rows)
    return np.einsum("ij,ij->i", rows @ m, rows)


def quad_forms_squared(m, rows):
    """Row-wise ``f_i^T m^2 f_i`` for symmetric ``m``."""
    m, rows = _check_rows(m, rows)
    g = rows @ m
    return np.einsum("ij,ij->i", g, g)
