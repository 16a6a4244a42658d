"""Sensing-side metrics: channel-estimation BCRB and the multi-target model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dmt import DmtCurve, RegimeError, constrained_dmt
from .wishart import CovarianceSpec

CHANNEL_ESTIMATION = "channel-estimation"
ANGLE_MODEL = "angle-model"


@dataclass(frozen=True)
class SensingModel:
    """Sensing link parameters.

    Attributes:
        n_s: Sensing receive antennas.
        eta_s: Sensing SNR (linear).
        t: Blocklength.
        m: Transmit antennas.
        kind: ``"channel-estimation"`` or ``"angle-model"``.
    """

    n_s: int
    eta_s: float
    t: int
    m: int
    kind: str = CHANNEL_ESTIMATION

    def __post_init__(self):
        if min(self.n_s, self.t, self.m) < 1:
            raise ValueError("antenna counts and blocklength must be positive")
        if self.eta_s < 0:
            raise ValueError("sensing SNR must be nonnegative")
        if self.kind not in (CHANNEL_ESTIMATION, ANGLE_MODEL):
            raise ValueError(f"unknown sensing model kind {self.kind!r}")


def bcrb_channel_estimation(cov: CovarianceSpec, model: SensingModel) -> float:
    """BCRB on the MSE of ``vec(H_s)`` under a standard complex Gaussian prior.

    With ``X X^H = T R`` the Bayesian information of ``vec(H_s)`` is
    ``I + (eta_s T / M) conj(R) kron I_{N_s}``, which does not depend on the
    particular codeword, so the bound is
    ``N_s * sum_i 1 / (1 + eta_s T lambda_i / M)``.
    """
    if model.kind != CHANNEL_ESTIMATION:
        raise ValueError("BCRB closed form is for the channel-estimation model")
    if cov.m != model.m:
        raise ValueError("covariance size must equal the transmit antenna count")
    g = model.eta_s * model.t / model.m
    return float(model.n_s * np.sum(1.0 / (1.0 + g * cov.eigvals)))


def bfim_from_codeword(x: np.ndarray, model: SensingModel) -> np.ndarray:
    """Dense Bayesian information matrix of ``vec(H_s)`` for codeword ``x`` (M x T).

    ``vec(Y_s) = sqrt(eta_s/M) (X^T kron I) vec(H_s) + noise``, so the
    information is ``I + (eta_s/M) (X^T kron I)^H (X^T kron I)``.
    """
    a = np.kron(np.asarray(x, dtype=complex).T, np.eye(model.n_s))
    return np.eye(a.shape[1]) + (model.eta_s / model.m) * (a.conj().T @ a)


def ula_steering(n: int, theta: float) -> np.ndarray:
    """Half-wavelength uniform linear array response ``exp(j pi k sin theta)``."""
    return np.exp(1j * np.pi * np.arange(n) * np.sin(theta))


def build_angle_channel(model: SensingModel, thetas, betas) -> np.ndarray:
    """``H_s = sum_n beta_n v(theta_n) a(theta_n)^H`` (N_s x M).

    ``a`` is the transmit and ``v`` the sensing-receive array response.
    """
    if model.kind != ANGLE_MODEL:
        raise ValueError("angle channel needs an angle-model SensingModel")
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    if thetas.shape != betas.shape:
        raise ValueError("thetas and betas must have equal length")
    h = np.zeros((model.n_s, model.m), dtype=complex)
    for th, b in zip(thetas, betas):
        h += b * np.outer(ula_steering(model.n_s, th), ula_steering(model.m, th).conj())
    return h


def rank_bound_curve(n_t: int, m: int, n_c: int, t: float) -> DmtCurve:
    """Converse curve for ``n_t`` targets: rank(R) <= min(M, N_t)."""
    if n_t > n_c:
        raise RegimeError(f"N_t={n_t} > N_c={n_c} is outside the supported regime")
    curve = constrained_dmt(min(m, n_t), n_c, t)
    return DmtCurve(curve.breakpoints, {**curve.metadata, "n_t": n_t, "m": m})
