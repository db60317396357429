import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from optdesign import square_grid
from optdesign.optimality import (
    CertificateFault,
    SingularInformation,
    _build,
    a_certificate,
    a_efficiency,
    a_statistics,
    certificate,
    criterion_value,
    d_certificate,
    d_efficiency,
    d_statistics,
    information_matrix,
)

# reference D-optimal 3x3 factorial weights keyed by number of nonzero coordinates
TABLE_D = {2: 0.1457, 1: 0.0803, 0: 0.0960}


def factorial_weights(cands, by_norm):
    w = np.array([by_norm[int(np.count_nonzero(x))] for x in cands.points])
    return w / w.sum()


def test_d_certificate_at_optimum(linear_pair):
    cert = d_certificate([0.5, 0.5], linear_pair)
    assert cert.max_statistic == pytest.approx(2.0)
    assert cert.gap == pytest.approx(0.0, abs=1e-12)
    assert cert.efficiency_lower_bound == pytest.approx(1.0)
    assert cert.certified()


def test_d_certificate_uniform_three_points(linear_line):
    cert = d_certificate(np.full(3, 1 / 3), linear_line)
    assert cert.max_statistic == pytest.approx(2.5)
    assert cert.gap == pytest.approx(0.5)
    assert cert.efficiency_lower_bound == pytest.approx(0.8)
    # lowest index wins the tie between -1 and +1
    assert cert.argmax_index == 0
    assert cert.argmax_point == (-1.0,)
    assert not cert.certified()


def test_a_certificate_at_optimum(linear_pair):
    cert = a_certificate([0.5, 0.5], linear_pair)
    assert cert.max_statistic == pytest.approx(1.0)
    assert cert.gap == pytest.approx(0.0, abs=1e-12)


def test_a_certificate_uniform_three_points(linear_line):
    stats = a_statistics(np.full(3, 1 / 3), linear_line.regressors)
    assert stats == pytest.approx([3.25 / 2.5, 1 / 2.5, 3.25 / 2.5])
    cert = a_certificate(np.full(3, 1 / 3), linear_line)
    assert cert.max_statistic == pytest.approx(1.3)
    assert cert.gap == pytest.approx(0.3)


def test_reference_weights_certify_on_fine_grid():
    g = square_grid(21)
    w = np.zeros(g.n)
    for x, wt in zip(square_grid(3).points, factorial_weights(square_grid(3), TABLE_D)):
        w[g.index_of(x)] = wt
    cert = d_certificate(w, g)
    assert cert.gap <= 0.01 * g.p


def test_singular_information(linear_line):
    with pytest.raises(SingularInformation):
        d_certificate([0.0, 1.0, 0.0], linear_line)
    with pytest.raises(SingularInformation):
        criterion_value([1.0, 0.0, 0.0], linear_line.regressors, "A")


def test_fault_on_impossible_gap(linear_line):
    with pytest.raises(CertificateFault):
        _build("D", np.array([1.0, 1.5, 1.0]), 2.0, linear_line)


def test_certificate_dispatch_and_dict(linear_line):
    w = np.full(3, 1 / 3)
    assert certificate(w, linear_line, "D") == d_certificate(w, linear_line)
    assert certificate(w, linear_line, "A") == a_certificate(w, linear_line)
    with pytest.raises(ValueError):
        certificate(w, linear_line, "E")
    d = d_certificate(w, linear_line).to_dict()
    assert d["certified"] is False and d["relative_gap"] == pytest.approx(0.25)


def test_weight_length_checked(linear_line):
    with pytest.raises(ValueError):
        d_certificate([0.5, 0.5], linear_line)


def test_efficiency_identity(linear_line):
    w = np.array([0.2, 0.3, 0.5])
    assert d_efficiency(w, w, linear_line) == pytest.approx(1.0)
    assert a_efficiency(w, w, linear_line) == pytest.approx(1.0)


def test_a_efficiency_uniform_vs_optimal(linear_line):
    opt = np.array([0.5, 0.0, 0.5])
    uni = np.full(3, 1 / 3)
    # tr M^-1 is 2 at the optimum and 1 + 1.5 = 2.5 for uniform weights
    assert a_efficiency(uni, opt, linear_line) == pytest.approx(2.0 / 2.5)


def test_d_efficiency_orientation():
    g = square_grid(3)
    opt = factorial_weights(g, TABLE_D)
    uni = np.full(g.n, 1 / g.n)
    ratio = d_efficiency(uni, opt, g)
    assert ratio > 1.0
    assert d_efficiency(uni, opt, g, conventional=True) == pytest.approx(1.0 / ratio)
    assert d_efficiency(uni, opt, g, normalized=True) == pytest.approx(ratio ** (1 / g.p))
    det_ratio = np.linalg.det(information_matrix(opt, g.regressors)) / np.linalg.det(
        information_matrix(uni, g.regressors))
    assert ratio == pytest.approx(det_ratio, rel=1e-10)


def test_efficiency_permutation_invariant(rng):
    g = square_grid(4)
    w1 = rng.dirichlet(np.ones(g.n))
    w2 = rng.dirichlet(np.ones(g.n))
    perm = rng.permutation(g.n)
    gp = g.subset(perm)
    assert d_efficiency(w1[perm], w2[perm], gp) == pytest.approx(d_efficiency(w1, w2, g), rel=1e-12)
    assert a_efficiency(w1[perm], w2[perm], gp) == pytest.approx(a_efficiency(w1, w2, g), rel=1e-12)


def test_variance_bound_below_normalized_efficiency(rng):
    g = square_grid(3)
    opt = factorial_weights(g, TABLE_D)
    for _ in range(20):
        w = rng.dirichlet(np.ones(g.n))
        bound = d_certificate(w, g).efficiency_lower_bound
        assert bound <= d_efficiency(w, opt, g, normalized=True, conventional=True) + 1e-3


@given(st.integers(0, 2**32 - 1))
def test_weighted_mean_identities(seed):
    rng = np.random.default_rng(seed)
    g = square_grid(4)
    w = rng.dirichlet(np.ones(g.n) * 0.5)
    d = d_statistics(w, g.regressors)
    a = a_statistics(w, g.regressors)
    assert float(w @ d) == pytest.approx(g.p, rel=1e-10)
    assert float(w @ a) == pytest.approx(1.0, abs=1e-10)
    assert d_certificate(w, g).max_statistic >= g.p - 1e-9
    assert a_certificate(w, g).gap >= -1e-9
    assert d_certificate(w, g).efficiency_lower_bound <= 1.0 + 1e-12
