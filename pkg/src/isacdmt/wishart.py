"""Log-singular exponents of ``H R H^H`` for Rayleigh ``H``.

With ``a_i`` the nonzero eigenvalues of ``H R H^H`` and ``snr`` the receive
SNR, the exponents are ``alpha_i = -ln(a_i) / (2 ln snr)``, stored
ascending (so ``a`` is descending). The nonzero spectrum of ``H R H^H``
equals that of the rank x rank complex Wishart matrix
``L^{1/2} H1^H H1 L^{1/2}`` with ``L`` the nonzero eigenvalues of ``R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import kernels
from .linalg import hermitian_eig, sample_ginibre

RANK_RTOL = 1e-10
TRACE_TOL = 1e-8
REPEAT_RTOL = 1e-8
PERTURB_REL = 1e-6


class UnsupportedRegimeError(ValueError):
    """rank(R) exceeds the number of receive antennas."""


class RepeatedEigenvalueError(ValueError):
    pass


@dataclass(frozen=True)
class CovarianceSpec:
    """Transmit covariance ``R`` (M x M, Hermitian PSD, trace M).

    Attributes:
        r: The matrix.
        eigvals: Eigenvalues, descending.
        rank: Number of eigenvalues above ``RANK_RTOL * max``.
    """

    r: np.ndarray
    eigvals: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, r, normalize: bool = True) -> "CovarianceSpec":
        r = np.atleast_2d(np.asarray(r, dtype=complex))
        m = r.shape[0]
        eig = hermitian_eig(r)
        lam = eig.eigenvalues
        if lam[0] <= 0:
            raise ValueError("covariance must be nonzero")
        if lam[-1] < -1e-10 * lam[0]:
            raise ValueError("covariance is not positive semidefinite")
        tr = float(np.trace(r).real)
        if normalize:
            r = r * (m / tr)
            lam = lam * (m / tr)
        elif abs(tr - m) > TRACE_TOL * m:
            raise ValueError(f"trace(R) = {tr} but must equal M = {m}")
        lam = np.clip(lam, 0.0, None)
        rank = int(np.count_nonzero(lam > RANK_RTOL * lam[0]))
        return cls(r=r, eigvals=lam, rank=rank)

    @classmethod
    def identity(cls, m: int) -> "CovarianceSpec":
        return cls.from_matrix(np.eye(m))

    @classmethod
    def diag(cls, values, normalize: bool = True) -> "CovarianceSpec":
        return cls.from_matrix(np.diag(np.asarray(values, dtype=float)), normalize)

    @property
    def m(self) -> int:
        return self.r.shape[0]

    @property
    def nonzero_eigvals(self) -> np.ndarray:
        return self.eigvals[: self.rank]


@dataclass(frozen=True)
class AlphaSample:
    alpha: np.ndarray
    snr: float
    rank: int

    @classmethod
    def from_eigenvalues(cls, a, snr: float) -> "AlphaSample":
        a = np.sort(np.atleast_1d(np.asarray(a, dtype=float)))[::-1]
        return cls(alpha=alpha_from_eigs(a, snr), snr=float(snr), rank=a.size)

    @classmethod
    def from_alpha(cls, alpha, snr: float) -> "AlphaSample":
        al = np.atleast_1d(np.asarray(alpha, dtype=float))
        if np.any(np.diff(al) < 0):
            raise ValueError("alpha must be ascending")
        return cls(alpha=al.copy(), snr=float(snr), rank=al.size)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(-2.0 * self.alpha * math.log(self.snr))


def alpha_from_eigs(a, snr: float) -> np.ndarray:
    """Map eigenvalues (descending along the last axis) to ascending exponents."""
    if not snr > 1:
        raise ValueError("snr must exceed 1")
    return -np.log(np.asarray(a, dtype=float)) / (2.0 * math.log(snr))


def _check_regime(cov: CovarianceSpec, n_c: int) -> None:
    if cov.rank > n_c:
        raise UnsupportedRegimeError(
            f"rank(R) = {cov.rank} > N_c = {n_c} is not supported")


def sample_wishart_eigs(cov: CovarianceSpec, n_c: int, size: int,
                        rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of the nonzero eigenvalues of ``H R H^H``, shape (size, rank), descending."""
    _check_regime(cov, n_c)
    h = sample_ginibre(n_c, cov.rank, rng, size=size)
    return kernels.gram_eigvalsh(h, cov.nonzero_eigvals)


def sample_alpha(cov: CovarianceSpec, n_c: int, snr: float,
                 rng: np.random.Generator) -> AlphaSample:
    """One channel draw mapped to its log-singular exponents."""
    a = sample_wishart_eigs(cov, n_c, 1, rng)[0]
    return AlphaSample(alpha=alpha_from_eigs(a, snr), snr=float(snr), rank=cov.rank)


def perturb_repeated(lam, rel: float = PERTURB_REL) -> np.ndarray:
    """Split repeated eigenvalues by a relative ``rel`` spread (sum preserved)."""
    lam = np.sort(np.asarray(lam, dtype=float))[::-1]
    offs = (lam.size - 1) / 2.0 - np.arange(lam.size)
    return lam * (1.0 + rel * offs)


def _has_repeats(lam: np.ndarray) -> bool:
    s = np.sort(lam)
    return bool(np.any(np.diff(s) <= REPEAT_RTOL * s[-1]))


def wishart_eig_log_density(a: np.ndarray, lam: np.ndarray, n_c: int) -> np.ndarray:
    """Log joint density of ordered (descending) complex Wishart eigenvalues.

    ``a`` has shape (..., m); ``lam`` holds the m distinct covariance
    eigenvalues. The density is

        det[exp(-a_j / lam_i)] prod_l a_l^(n-m) / (n-l)!
        prod_{k<l} (a_k - a_l) / (lam_k - lam_l) * prod_i lam_i^(m-1-n)

    and is evaluated with per-row rescaling and ``slogdet``. Points that
    are not strictly descending get ``-inf``.
    """
    a = np.asarray(a, dtype=float)
    lam = np.asarray(lam, dtype=float)
    m = lam.size
    if a.shape[-1] != m:
        raise ValueError("eigenvalue vector length must equal rank")
    a2 = a.reshape(-1, m)
    out = np.full(a2.shape[0], -np.inf)
    ok = np.all(a2 > 0, axis=1)
    if m > 1:
        ok &= np.all(np.diff(a2, axis=1) < 0, axis=1)
    if not np.any(ok):
        return out.reshape(a.shape[:-1])
    av = a2[ok]
    const = -np.sum(gammaln(n_c - np.arange(1, m + 1) + 1.0)) + (m - 1 - n_c) * np.sum(np.log(lam))
    val = (n_c - m) * np.sum(np.log(av), axis=1) + const
    if m == 1:
        val = val - av[:, 0] / lam[0]
    else:
        # E_ij = exp(-a_j / lam_i); pull exp(-a_min / lam_i) out of row i
        amin = av[:, -1]
        e = np.exp(-(av[:, None, :] - amin[:, None, None]) / lam[None, :, None])
        sgn, logdet = np.linalg.slogdet(e)
        logdet = logdet - amin * np.sum(1.0 / lam)
        iu, ju = np.triu_indices(m, k=1)
        dl = lam[iu] - lam[ju]
        val = val + logdet + np.sum(np.log(av[:, iu] - av[:, ju]), axis=1) - np.sum(np.log(np.abs(dl)))
        sign = sgn * np.prod(np.sign(dl))
        # total positivity makes the product positive; anything else is round-off
        val = np.where(sign > 0, val, -np.inf)
    out[ok] = val
    return out.reshape(a.shape[:-1])


def alpha_log_density(alpha: np.ndarray, snr: float, lam: np.ndarray, n_c: int) -> np.ndarray:
    """Vectorised log density of ascending exponents (shape (..., m))."""
    alpha = np.asarray(alpha, dtype=float)
    ln_eta = math.log(snr)
    a = np.exp(-2.0 * alpha * ln_eta)
    # Jacobian |da/dalpha| = 2 ln(eta) a
    jac = alpha.shape[-1] * math.log(2.0 * ln_eta) - 2.0 * ln_eta * np.sum(alpha, axis=-1)
    return wishart_eig_log_density(a, lam, n_c) + jac


def alpha_log_pdf(alpha: AlphaSample, cov: CovarianceSpec, n_c: int,
                  perturb: bool = False) -> float:
    """Natural-log joint density of the exponent vector ``alpha``.

    Distinct nonzero eigenvalues of ``R`` are required; pass ``perturb=True``
    to split repeated ones by a relative 1e-6 (the density is continuous in
    the covariance eigenvalues, so the result is accurate to about that
    level).
    """
    _check_regime(cov, n_c)
    if alpha.rank != cov.rank:
        raise ValueError(f"alpha has {alpha.rank} entries, rank(R) = {cov.rank}")
    al = np.asarray(alpha.alpha, dtype=float)
    if np.any(np.diff(al) <= 0):
        raise ValueError("alpha must be strictly ascending")
    lam = cov.nonzero_eigvals
    if lam.size > 1 and _has_repeats(lam):
        if not perturb:
            raise RepeatedEigenvalueError(
                "R has repeated nonzero eigenvalues; call with perturb=True")
        lam = perturb_repeated(lam)
    return float(alpha_log_density(al, alpha.snr, lam, n_c))


def exponent_weights(rank: int, n_c: int) -> np.ndarray:
    """``2 (N_c + rank + 1 - 2i)`` for i = 1..rank."""
    i = np.arange(1, rank + 1)
    return 2.0 * (n_c + rank + 1 - 2 * i)


def asymptotic_exponent(alpha, cov_rank: int, n_c: int) -> float:
    """High-SNR limit of ``ln p(alpha) / ln snr``.

    ``-2 sum (N_c + rank + 1 - 2i) alpha_i`` when every exponent is
    nonnegative, ``-inf`` once the smallest is negative.
    """
    al = np.sort(np.atleast_1d(np.asarray(alpha, dtype=float)))
    if al.size != cov_rank:
        raise ValueError("alpha length must equal the rank")
    if al[0] < 0:
        return -math.inf
    return float(-np.dot(exponent_weights(cov_rank, n_c), al))
