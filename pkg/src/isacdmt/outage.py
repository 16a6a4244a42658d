"""Outage Monte Carlo in the exponent domain.

A channel is in outage at rate ``r ln(snr)`` when
``sum_i (2T + 1 - 2i)(0.5 - alpha_i)^+ < T r``. Codewords are always taken
Haar-uniform on the constraint manifold (that input minimises outage), so
the only randomness left is the channel, i.e. the Wishart eigenvalues.

Every SNR grid point reuses the same channel draws (common random
numbers); only the map from eigenvalues to exponents changes with SNR.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dmt import mi_coefficient
from .linalg import hermitian_eig
from .manifold import LOG_PI_E, GeneralizedStiefel, log_volume
from .rng import stream
from .wishart import AlphaSample, CovarianceSpec, sample_wishart_eigs, _check_regime

BLOCK_SIZE = 1 << 16
MIN_HITS = 50
Z95 = 1.959963984540054


class InsufficientResolutionError(RuntimeError):
    """Fewer than two grid points collected enough outage hits to fit a slope.

    The partially filled estimate is attached as ``estimate``.
    """

    def __init__(self, message: str, estimate: "OutageEstimate"):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage frequencies over an SNR grid and their log-log slope."""

    snr_grid: np.ndarray
    hits: np.ndarray
    n_samples: int
    fitted_slope: float
    slope_stderr: float
    admitted: np.ndarray

    @property
    def p_hat(self) -> np.ndarray:
        return self.hits / self.n_samples

    @property
    def ci_half_width(self) -> np.ndarray:
        p = self.p_hat
        return Z95 * np.sqrt(p * (1.0 - p) / self.n_samples)


@dataclass(frozen=True)
class MiApproximation:
    """Volume-based mutual-information approximation for one channel draw."""

    nats: float
    dominant: int

    @property
    def bounded(self) -> bool:
        return self.dominant == 0


def asymptotic_mi_coefficient(alpha: AlphaSample, t: float) -> float:
    """Multiplier of ``ln(snr)`` in the high-SNR mutual information.

    Exponents at or above 1/2 contribute nothing.
    """
    return mi_coefficient(alpha.alpha, t)


def fit_log_slope(snr_grid, hits, n_samples: int, min_hits: int = MIN_HITS):
    """Least-squares slope of ``ln p_hat`` against ``ln snr`` over admitted points.

    Returns ``(slope, stderr, admitted_mask)``; slope is NaN with fewer than
    two admitted points, stderr is NaN with fewer than three.
    """
    snr_grid = np.asarray(snr_grid, dtype=float)
    hits = np.asarray(hits)
    adm = hits >= min_hits
    if np.count_nonzero(adm) < 2:
        return math.nan, math.nan, adm
    x = np.log(snr_grid[adm])
    y = np.log(hits[adm] / n_samples)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean()) / sxx)
    if x.size < 3:
        return slope, math.nan, adm
    resid = y - y.mean() - slope * xc
    stderr = math.sqrt(float(resid @ resid) / (x.size - 2) / sxx)
    return slope, stderr, adm


def _blocks(n_samples: int, block_size: int):
    return [(i, min(block_size, n_samples - i * block_size))
            for i in range(-(-n_samples // block_size))]


def _outage_block(args):
    seed, idx, size, cov, n_c, log_snr, t, r = args
    a = sample_wishart_eigs(cov, n_c, size, stream(seed, idx))
    return kernels.outage_counts(a, log_snr, t, r)


def _tail_block(args):
    seed, idx, size, cov, n_c, log_snr, thresh = args
    a = sample_wishart_eigs(cov, n_c, size, stream(seed, idx))
    # alpha_1 > thresh  <=>  largest eigenvalue < snr^(-2 thresh)
    lmax = np.log(a[:, 0])
    return np.count_nonzero(lmax[:, None] < -2.0 * thresh * log_snr[None, :], axis=0)


def _run(fn, jobs, workers: int) -> np.ndarray:
    if workers <= 1:
        parts = [fn(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, jobs))
    return np.sum(parts, axis=0).astype(np.int64)


def _check_grid(snr_grid) -> np.ndarray:
    g = np.asarray(snr_grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 1) or np.any(np.diff(g) <= 0):
        raise ValueError("snr grid must be ascending and above 1 (linear scale)")
    return g


def estimate_outage(cov: CovarianceSpec, n_c: int, t: float, r: float, snr_grid,
                    n_samples: int, seed: int, workers: int = 1,
                    block_size: int = BLOCK_SIZE,
                    min_hits: int = MIN_HITS) -> OutageEstimate:
    """Estimate ``P_out(r ln snr)`` on a grid and fit the diversity slope.

    Samples are drawn in fixed blocks, block ``i`` from stream ``(seed, i)``,
    and only hit counts are summed, so the result is identical for any
    ``workers``.

    Raises:
        InsufficientResolutionError: fewer than two grid points reached
            ``min_hits`` outage events.
    """
    _check_regime(cov, n_c)
    if t < cov.rank:
        raise ValueError("blocklength must be at least rank(R)")
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    grid = _check_grid(snr_grid)
    log_snr = np.log(grid)
    jobs = [(seed, i, size, cov, n_c, log_snr, float(t), float(r))
            for i, size in _blocks(n_samples, block_size)]
    hits = _run(_outage_block, jobs, workers)
    return _finish(grid, hits, n_samples, min_hits)


def estimate_alpha_tail(cov: CovarianceSpec, n_c: int, thresh: float, snr_grid,
                        n_samples: int, seed: int, workers: int = 1,
                        block_size: int = BLOCK_SIZE,
                        min_hits: int = MIN_HITS) -> OutageEstimate:
    """Estimate ``P(alpha_1 > thresh)`` (every exponent above ``thresh``) over a grid.

    Its log-log slope tends to ``-2 thresh N_c rank``.
    """
    _check_regime(cov, n_c)
    grid = _check_grid(snr_grid)
    log_snr = np.log(grid)
    jobs = [(seed, i, size, cov, n_c, log_snr, float(thresh))
            for i, size in _blocks(n_samples, block_size)]
    hits = _run(_tail_block, jobs, workers)
    return _finish(grid, hits, n_samples, min_hits)


def _finish(grid, hits, n_samples, min_hits) -> OutageEstimate:
    slope, stderr, adm = fit_log_slope(grid, hits, n_samples, min_hits)
    est = OutageEstimate(snr_grid=grid, hits=hits, n_samples=int(n_samples),
                         fitted_slope=slope, slope_stderr=stderr, admitted=adm)
    if math.isnan(slope):
        raise InsufficientResolutionError(
            f"only {int(np.count_nonzero(adm))} grid point(s) reached {min_hits} hits; "
            "increase n_samples or target a smaller diversity order", est)
    return est


def mi_approx_from_alpha(alpha, snr: float, t: int, m_tx: int) -> MiApproximation:
    """``ln Vol(S) - m (2T - m)/2 ln(pi e)`` on the dominant-dimension manifold.

    ``S`` has ``sigma_i = sqrt(T/M) snr^(0.5 - alpha_i)`` for the ``m``
    exponents below 1/2. This is the receive entropy approximation minus the
    noise entropy ``m T ln(pi e)``; it is an asymptotic statement only.
    """
    al = np.sort(np.atleast_1d(np.asarray(alpha, dtype=float)))
    m = int(np.count_nonzero(al < 0.5))
    if m == 0:
        return MiApproximation(0.0, 0)
    man = GeneralizedStiefel.from_alpha(al, snr, t, m_tx)
    return MiApproximation(log_volume(man) - 0.5 * m * (2 * t - m) * LOG_PI_E, m)


def finite_snr_mi_approx(cov: CovarianceSpec, h_c: np.ndarray, snr: float,
                         t: int) -> MiApproximation:
    """Volume-based MI approximation (nats) for one channel realisation ``h_c``."""
    h_c = np.asarray(h_c, dtype=complex)
    if h_c.shape[1] != cov.m:
        raise ValueError("channel column count must equal the covariance size")
    _check_regime(cov, h_c.shape[0])
    g = h_c @ cov.r @ h_c.conj().T
    a = hermitian_eig(g, tol=1e-10).eigenvalues[: cov.rank]
    a = np.maximum(a, np.finfo(float).tiny)
    alpha = AlphaSample.from_eigenvalues(a, snr).alpha
    return mi_approx_from_alpha(alpha, snr, t, cov.m)
