import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isacdmt.dmt import RegimeError
from isacdmt.linalg import haar_unitary, sample_ginibre
from isacdmt.manifold import GeneralizedStiefel, uniform_sample
from isacdmt.rng import stream
from isacdmt.sensing import (ANGLE_MODEL, SensingModel, bcrb_channel_estimation,
                             bfim_from_codeword, build_angle_channel, rank_bound_curve)
from isacdmt.wishart import CovarianceSpec


def random_trace_m_cov(m, rng):
    g = sample_ginibre(m, m, rng)
    return CovarianceSpec.from_matrix(g @ g.conj().T)


def codeword_for(cov, t, rng):
    man = GeneralizedStiefel.from_shape(t * cov.r, t)
    return uniform_sample(man, rng)


def test_zero_snr_prior_only():
    cov = CovarianceSpec.diag([3.0, 1.0, 0.0])
    assert bcrb_channel_estimation(cov, SensingModel(2, 0.0, 5, 3)) == 6.0


def test_identity_example():
    e = bcrb_channel_estimation(CovarianceSpec.identity(3), SensingModel(3, 10.0, 10, 3))
    assert e == pytest.approx(9 / (1 + 100 / 3), rel=1e-12)
    assert e == pytest.approx(0.26214, abs=1e-5)


@settings(max_examples=25, deadline=None)
@given(m=st.integers(1, 4), ns=st.integers(1, 4), extra_t=st.integers(0, 4),
       eta=st.floats(0.0, 100.0), seed=st.integers(0, 2**31))
def test_closed_form_vs_dense_inverse(m, ns, extra_t, eta, seed):
    rng = stream(seed)
    cov = random_trace_m_cov(m, rng)
    t = m + extra_t
    model = SensingModel(ns, eta, t, m)
    x = codeword_for(cov, t, rng)
    j = bfim_from_codeword(x, model)
    dense = np.trace(np.linalg.inv(j)).real
    assert bcrb_channel_estimation(cov, model) == pytest.approx(dense, rel=1e-10, abs=1e-12)


def test_identity_is_optimal():
    rng = stream(1)
    model = SensingModel(3, 5.0, 6, 3)
    e_id = bcrb_channel_estimation(CovarianceSpec.identity(3), model)
    for _ in range(1000):
        assert e_id <= bcrb_channel_estimation(random_trace_m_cov(3, rng), model) + 1e-12


def test_pairwise_averaging_never_increases():
    rng = stream(2)
    model = SensingModel(2, 3.0, 5, 4)
    for _ in range(200):
        lam = rng.dirichlet(np.ones(4)) * 4
        i, j = rng.choice(4, 2, replace=False)
        avg = lam.copy()
        avg[i] = avg[j] = 0.5 * (lam[i] + lam[j])
        e0 = bcrb_channel_estimation(CovarianceSpec.diag(lam), model)
        e1 = bcrb_channel_estimation(CovarianceSpec.diag(avg), model)
        assert e1 <= e0 + 1e-12


def test_unitary_rotation_invariance():
    cov = CovarianceSpec.diag([2.5, 1.0, 0.5])
    u = haar_unitary(3, stream(3))
    rot = CovarianceSpec.from_matrix(u @ cov.r @ u.conj().T)
    model = SensingModel(2, 4.0, 4, 3)
    assert bcrb_channel_estimation(rot, model) == pytest.approx(bcrb_channel_estimation(cov, model))


def test_model_validation():
    with pytest.raises(ValueError):
        SensingModel(0, 1.0, 4, 2)
    with pytest.raises(ValueError):
        SensingModel(2, -1.0, 4, 2)
    with pytest.raises(ValueError):
        SensingModel(2, 1.0, 4, 2, kind="radar")
    with pytest.raises(ValueError):
        bcrb_channel_estimation(CovarianceSpec.identity(3), SensingModel(2, 1.0, 4, 2))
    with pytest.raises(ValueError):
        bcrb_channel_estimation(CovarianceSpec.identity(2), SensingModel(2, 1.0, 4, 2, ANGLE_MODEL))


def angle_model(ns=6, m=4):
    return SensingModel(ns, 1.0, 8, m, kind=ANGLE_MODEL)


def test_angle_channel_ranks():
    model = angle_model()
    h1 = build_angle_channel(model, [0.3], [1.0 + 0.5j])
    assert h1.shape == (6, 4)
    assert np.linalg.matrix_rank(h1, tol=1e-8) == 1
    h2 = build_angle_channel(model, [0.3, -0.7], [1.0, 0.8j])
    s = np.linalg.svd(h2, compute_uv=False)
    assert s[1] > 1e-8 and np.all(s[2:] < 1e-8)
    hd = build_angle_channel(model, [0.3, 0.3], [1.0, 2.0])
    assert np.linalg.matrix_rank(hd, tol=1e-8) == 1


def test_angle_channel_rank_cap():
    model = angle_model(ns=3, m=2)
    h = build_angle_channel(model, [-1.0, 0.1, 0.9], [1.0, 1.0, 1.0])
    assert np.linalg.matrix_rank(h, tol=1e-8) <= 2


def test_angle_channel_validation():
    with pytest.raises(ValueError):
        build_angle_channel(SensingModel(3, 1.0, 4, 2), [0.1], [1.0])
    with pytest.raises(ValueError):
        build_angle_channel(angle_model(), [0.1, 0.2], [1.0])


def test_rank_bound_family():
    c10 = rank_bound_curve(10, 10, 10, 1e12)
    assert c10.breakpoints[0] == (0.0, 100.0)
    assert c10.r_max == pytest.approx(10.0, rel=1e-9)
    assert rank_bound_curve(2, 10, 10, 20)(0.0) == 20.0
    grid = np.linspace(0, 10, 300)
    curves = [rank_bound_curve(nt, 10, 10, 20)(grid) for nt in (2, 4, 6, 8, 10)]
    for lo, hi in zip(curves, curves[1:]):
        assert np.all(lo <= hi + 1e-12)
    with pytest.raises(RegimeError):
        rank_bound_curve(11, 12, 10, 20)
