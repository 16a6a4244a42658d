import math

import numpy as np
import pytest

from isacdmt.dmt import constrained_dmt
from isacdmt.linalg import sample_ginibre
from isacdmt.outage import (InsufficientResolutionError, asymptotic_mi_coefficient,
                            estimate_alpha_tail, estimate_outage, finite_snr_mi_approx,
                            fit_log_slope, mi_approx_from_alpha)
from isacdmt.rng import stream
from isacdmt.wishart import AlphaSample, CovarianceSpec

GRID = [1e3, 1e4, 1e5, 1e6]


def test_fit_exact_power_law():
    snr = np.array([1e2, 1e3, 1e4, 1e5])
    n = 10**9
    hits = np.round(n * 0.5 * snr ** -0.7)
    slope, se, adm = fit_log_slope(snr, hits, n)
    assert slope == pytest.approx(-0.7, abs=1e-4)
    assert se < 1e-4 and adm.all()


def test_fit_admission_rule():
    slope, se, adm = fit_log_slope([10, 100, 1000], [500, 60, 10], 10_000)
    assert adm.tolist() == [True, True, False]
    assert math.isfinite(slope) and math.isnan(se)
    slope, _, _ = fit_log_slope([10, 100], [500, 10], 10_000)
    assert math.isnan(slope)


def test_rank_one_slope_small():
    cov = CovarianceSpec.identity(1)
    est = estimate_outage(cov, 1, 2, 0.25, GRID, 200_000, seed=3)
    assert -est.fitted_slope == pytest.approx(2 / 3, rel=0.15)
    assert est.p_hat.shape == (4,) and np.all(est.ci_half_width >= 0)


def test_deterministic_and_worker_independent():
    cov = CovarianceSpec.identity(2)
    kw = dict(n_c=2, t=4, r=1.2, snr_grid=[10, 100, 1000], n_samples=40_000, seed=5)
    a = estimate_outage(cov, **kw)
    b = estimate_outage(cov, **kw)
    c = estimate_outage(cov, workers=2, block_size=4096, **kw)
    d = estimate_outage(cov, workers=1, block_size=4096, **kw)
    assert np.array_equal(a.hits, b.hits) and a.fitted_slope == b.fitted_slope
    assert np.array_equal(c.hits, d.hits)


def test_zero_rate_guard():
    with pytest.raises(InsufficientResolutionError) as exc:
        estimate_outage(CovarianceSpec.identity(1), 1, 2, 0.0, GRID, 10_000, seed=1)
    assert np.all(exc.value.estimate.p_hat == 0)
    assert "n_samples" in str(exc.value)


def test_rate_beyond_endpoint_outage_certain():
    cov = CovarianceSpec.identity(2)
    r = constrained_dmt(2, 2, 4).r_max + 0.1
    est = estimate_outage(cov, 2, 4, r, [1e2, 1e8, 1e40], 20_000, seed=2)
    assert est.p_hat[-1] > 0.99
    assert np.all(np.diff(est.p_hat) >= 0)


def test_p_hat_nonincreasing_in_snr():
    cov = CovarianceSpec.diag([2.0, 1.0])
    est = estimate_outage(cov, 2, 4, 1.2, [10, 30, 100, 300, 1000], 100_000, seed=9)
    tol = 2 * (est.ci_half_width[:-1] + est.ci_half_width[1:])
    assert np.all(np.diff(est.p_hat) <= tol)


def test_estimator_validation():
    cov = CovarianceSpec.identity(2)
    with pytest.raises(ValueError):
        estimate_outage(cov, 2, 4, 0.5, [10, 5], 10_000, seed=1)
    with pytest.raises(ValueError):
        estimate_outage(cov, 2, 4, 0.5, [10], 100, seed=1)
    with pytest.raises(ValueError):
        estimate_outage(cov, 2, 1, 0.5, [10], 10_000, seed=1)


def test_alpha_tail_slope():
    cov = CovarianceSpec.identity(1)
    est = estimate_alpha_tail(cov, 2, 0.2, [1e2, 1e3, 1e4], 500_000, seed=4)
    assert est.fitted_slope == pytest.approx(-0.8, rel=0.15)


def test_asymptotic_coefficient():
    assert asymptotic_mi_coefficient(AlphaSample.from_alpha([0.1, 0.3], 1e4), 4) == pytest.approx(3.8)
    assert asymptotic_mi_coefficient(AlphaSample.from_alpha([0.6, 0.7], 1e4), 4) == 0.0


def test_mi_approx_bounded_regime():
    mi = mi_approx_from_alpha([0.5, 0.8], 1e6, 4, 2)
    assert mi.nats == 0.0 and mi.bounded


def test_mi_approx_rank_one_slope():
    t, m, al = 5, 2, 0.2
    e1, e2 = 1e6, 1e7
    d = (mi_approx_from_alpha([al], e2, t, m).nats - mi_approx_from_alpha([al], e1, t, m).nats)
    assert d / math.log(e2 / e1) == pytest.approx((2 * t - 1) * (0.5 - al), rel=1e-10)


def test_mi_approx_ratio_converges_at_huge_snr():
    al = [0.05, 0.2]
    coef = asymptotic_mi_coefficient(AlphaSample.from_alpha(al, 10.0), 6)
    ratios = [mi_approx_from_alpha(al, 10.0**k, 6, 2).nats / (coef * k * math.log(10)) for k in (8, 40, 200)]
    assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)
    assert ratios[2] == pytest.approx(1.0, abs=0.01)


def test_finite_snr_mi_approx_runs():
    cov = CovarianceSpec.diag([2.0, 1.0])
    h = sample_ginibre(3, 2, stream(1))
    mi = finite_snr_mi_approx(cov, h, 1e4, 6)
    assert math.isfinite(mi.nats) and mi.dominant >= 1
    with pytest.raises(ValueError):
        finite_snr_mi_approx(cov, sample_ginibre(3, 3, stream(1)), 1e4, 6)
