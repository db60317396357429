"""Equivalence-theorem certificates and efficiency ratios.

For a design ``w`` with information matrix ``M = sum_i w_i f_i f_i^T``:

* D-optimality holds iff ``max_i f_i^T M^{-1} f_i <= p``;
* A-optimality holds iff ``max_i f_i^T M^{-2} f_i / tr(M^{-1}) <= 1``.

The gap ``max_statistic - threshold`` is never negative in exact arithmetic
because the weighted mean of each statistic equals its threshold.
"""
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import NotPositiveDefinite, cholesky, inverse_spd, log_det, quad_forms, quad_forms_squared

__all__ = [
    "CERTIFY_TOLERANCE",
    "SingularInformation",
    "CertificateFault",
    "Certificate",
    "information_matrix",
    "factor_information",
    "d_statistics",
    "a_statistics",
    "d_certificate",
    "a_certificate",
    "certificate",
    "criterion_value",
    "d_efficiency",
    "a_efficiency",
]

CERTIFY_TOLERANCE = 1e-2
_FAULT_GAP = -1e-6


class SingularInformation(NotPositiveDefinite):
    """The information matrix of a design is singular (support spans < p directions)."""


class CertificateFault(ArithmeticError):
    """A certificate claimed better than optimal: the statistics are numerically broken."""


@dataclass(frozen=True)
class Certificate:
    criterion: str
    max_statistic: float
    threshold: float
    gap: float
    argmax_index: int
    argmax_point: tuple
    efficiency_lower_bound: float

    @property
    def relative_gap(self):
        return self.gap / self.threshold

    def certified(self, tolerance=CERTIFY_TOLERANCE):
        return self.relative_gap <= tolerance

    def to_dict(self, tolerance=CERTIFY_TOLERANCE):
        d = asdict(self)
        d["argmax_point"] = list(self.argmax_point)
        d["relative_gap"] = self.relative_gap
        d["tolerance"] = tolerance
        d["certified"] = self.certified(tolerance)
        return d


def _weights(w, n):
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"weights of shape {w.shape} do not match {n} candidates")
    return w


def information_matrix(w, regressors):
    """``sum_i w_i f_i f_i^T``."""
    f = np.asarray(regressors, dtype=float)
    w = _weights(w, f.shape[0])
    m = f.T @ (w[:, None] * f)
    return 0.5 * (m + m.T)


def factor_information(w, regressors):
    try:
        return cholesky(information_matrix(w, regressors))
    except NotPositiveDefinite as exc:
        raise SingularInformation(f"information matrix is singular: {exc}") from None


def d_statistics(w, regressors):
    """Variance function ``d_i = f_i^T M^{-1} f_i`` at every candidate."""
    minv = inverse_spd(factor_information(w, regressors))
    return quad_forms(minv, regressors)


def a_statistics(w, regressors):
    """Normalized A-direction statistic ``f_i^T M^{-2} f_i / tr(M^{-1})``."""
    minv = inverse_spd(factor_information(w, regressors))
    return quad_forms_squared(minv, regressors) / np.trace(minv)


def _build(criterion, stats, threshold, cands):
    i = int(np.argmax(stats))  # first maximum: lowest index wins ties
    mx = float(stats[i])
    gap = mx - threshold
    if gap < _FAULT_GAP:
        raise CertificateFault(
            f"{criterion}-certificate gap {gap:.3e} is below zero beyond rounding"
        )
    return Certificate(
        criterion=criterion,
        max_statistic=mx,
        threshold=float(threshold),
        gap=gap,
        argmax_index=i,
        argmax_point=tuple(float(v) for v in cands.points[i]),
        efficiency_lower_bound=min(1.0, threshold / mx),
    )


def d_certificate(w, cands):
    """D-optimality certificate over every candidate.

    ``efficiency_lower_bound = p / max_i d_i`` bounds the normalized
    D-efficiency ``(|M| / |M*|)^(1/p)`` from below.
    """
    w = _weights(w, cands.n)
    return _build("D", d_statistics(w, cands.regressors), cands.p, cands)


def a_certificate(w, cands):
    """A-optimality certificate over every candidate.

    The directional condition is checked at the vertices of the simplex,
    where a linear functional of ``w`` attains its maximum.
    ``efficiency_lower_bound = 1 / max_statistic`` bounds
    ``tr(M*^{-1}) / tr(M^{-1})`` from below.
    """
    w = _weights(w, cands.n)
    return _build("A", a_statistics(w, cands.regressors), 1.0, cands)


def certificate(w, cands, criterion):
    if criterion == "D":
        return d_certificate(w, cands)
    if criterion == "A":
        return a_certificate(w, cands)
    raise ValueError(f"unknown criterion {criterion!r}")


def criterion_value(w, regressors, criterion):
    """``-log|M|`` for D, ``tr(M^{-1})`` for A."""
    fac = factor_information(w, regressors)
    if criterion == "D":
        return -log_det(fac)
    if criterion == "A":
        return float(np.trace(inverse_spd(fac)))
    raise ValueError(f"unknown criterion {criterion!r}")


def d_efficiency(test, reference, cands, normalized=False, conventional=False):
    """Determinant ratio between two designs on the same candidates.

    By default this is ``|M_ref| / |M_test|`` (reference in the numerator),
    which is >= 1 when the reference is optimal. ``conventional=True`` flips
    it to ``|M_test| / |M_ref|`` so that an optimal reference gives values in
    ``(0, 1]``. ``normalized=True`` takes the ``1/p``-th root.
    """
    ld_test = log_det(factor_information(_weights(test, cands.n), cands.regressors))
    ld_ref = log_det(factor_information(_weights(reference, cands.n), cands.regressors))
    diff = ld_test - ld_ref if conventional else ld_ref - ld_test
    if normalized:
        diff /= cands.p
    return float(np.exp(diff))


def a_efficiency(test, reference, cands):
    """``tr(M_ref^{-1}) / tr(M_test^{-1})``; <= 1 when the reference is A-optimal."""
    t_test = criterion_value(_weights(test, cands.n), cands.regressors, "A")
    t_ref = criterion_value(_weights(reference, cands.n), cands.regressors, "A")
    return t_ref / t_test
