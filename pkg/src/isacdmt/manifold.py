"""Generalized Stiefel manifolds ``{X in C^{k x n} : X X^H = A}``.

The manifold carries the Euclidean metric ``g(D1, D2) = Re tr(D1 D2^H)``.
Everything here is expressed in the eigenbasis of the shape matrix ``A``:
with ``A = Q diag(sigma^2) Q^H`` every point is ``Q diag(sigma) U`` for some
``U`` with orthonormal rows, so curvature, tube and volume quantities depend
on ``sigma`` alone.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .linalg import haar_stiefel, hermitian_eig, svd

RANK_RTOL = 1e-12
MANIFOLD_TOL = 1e-8
LOG_PI_E = math.log(math.pi * math.e)


class ManifoldError(ValueError):
    pass


class TangencyError(ManifoldError):
    """A matrix offered as a tangent vector violates a tangent-space constraint."""


@dataclass(frozen=True)
class GeneralizedStiefel:
    """The manifold ``S_A^{(k, n)}``.

    Build it with :meth:`from_shape`, :meth:`from_sigma` or
    :meth:`from_alpha` rather than by hand.

    Attributes:
        k: Row count of the points.
        n: Column count of the points.
        a: Shape matrix (k x k, Hermitian PSD).
        rank: Rank of ``a``.
        sigma: Square roots of the nonzero eigenvalues of ``a``, descending.
        basis: k x rank matrix of the matching eigenvectors.
    """

    k: int
    n: int
    a: np.ndarray = field(repr=False)
    rank: int
    sigma: np.ndarray
    basis: np.ndarray = field(repr=False)

    @classmethod
    def from_shape(cls, a, n: int) -> "GeneralizedStiefel":
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        eig = hermitian_eig(a)
        lam = eig.eigenvalues
        scale = max(float(lam[0]), 0.0)
        if lam[-1] < -1e-10 * max(scale, 1.0):
            raise ManifoldError("shape matrix is not positive semidefinite")
        keep = lam > RANK_RTOL * scale if scale > 0 else np.zeros_like(lam, bool)
        rank = int(np.count_nonzero(keep))
        if n < rank:
            raise ManifoldError(f"need n >= rank(A); got n={n}, rank={rank}")
        return cls(k=a.shape[0], n=int(n), a=a, rank=rank,
                   sigma=np.sqrt(lam[keep]), basis=eig.eigenvectors[:, keep])

    @classmethod
    def from_sigma(cls, sigma, n: int) -> "GeneralizedStiefel":
        """Diagonal shape ``A = diag(sigma^2)``; ``sigma`` must be positive."""
        s = np.sort(np.atleast_1d(np.asarray(sigma, dtype=float)))[::-1]
        if s.size == 0 or s[-1] <= 0 or not np.all(np.isfinite(s)):
            raise ManifoldError("sigma must be positive and finite; reduce to the rank first")
        if n < s.size:
            raise ManifoldError(f"need n >= rank(A); got n={n}, rank={s.size}")
        return cls(k=s.size, n=int(n), a=np.diag(s**2).astype(complex), rank=s.size,
                   sigma=s, basis=np.eye(s.size, dtype=complex))

    @classmethod
    def from_alpha(cls, alpha, snr: float, t: int, m_tx: int) -> "GeneralizedStiefel":
        """The dominant-dimension manifold for log-singular exponents ``alpha``.

        Only exponents below 1/2 survive; they give
        ``sigma_i = sqrt(t / m_tx) * snr**(0.5 - alpha_i)`` with ``n = t``.
        """
        al = np.sort(np.atleast_1d(np.asarray(alpha, dtype=float)))
        al = al[al < 0.5]
        if al.size == 0:
            raise ManifoldError("no dominant dimension (all alpha >= 0.5)")
        log_sigma = 0.5 * math.log(t / m_tx) + (0.5 - al) * math.log(snr)
        return cls.from_sigma(np.exp(log_sigma), t)

    @property
    def real_dimension(self) -> int:
        return self.rank * (2 * self.n - self.rank)

    @property
    def sigma_min(self) -> float:
        return float(self.sigma[-1])

    def _require_full_rank(self) -> None:
        if self.rank != self.k:
            raise ManifoldError("operation needs full-rank A; build the rank-reduced manifold")


@dataclass(frozen=True)
class GeometryReport:
    max_second_fundamental_form: float
    tube_radius_lower: float
    injectivity_radius_lower: float
    c_bound: float
    log_volume: float

    def as_dict(self) -> dict:
        return {
            "max_second_fundamental_form": self.max_second_fundamental_form,
            "tube_radius_lower": self.tube_radius_lower,
            "injectivity_radius_lower": self.injectivity_radius_lower,
            "c_bound": self.c_bound,
            "log_volume": self.log_volume,
        }


def uniform_sample(m: GeneralizedStiefel, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed point ``Q diag(sigma) F`` with F uniform on the standard Stiefel."""
    f = haar_stiefel(m.rank, m.n, rng)
    return (m.basis * m.sigma) @ f


def log_standard_stiefel_volume(rank: int, n: int) -> float:
    """ln Vol of ``{U in C^{rank x n} : U U^H = I}``: sum of ln(2 pi^i / (i-1)!)."""
    i = np.arange(n - rank + 1, n + 1, dtype=float)
    return float(np.sum(math.log(2.0) + i * math.log(math.pi) - gammaln(i)))


def log_volume_from_sigma(sigma, n: int) -> float:
    s = np.asarray(sigma, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ManifoldError("sigma must be a non-empty vector")
    if np.any(s <= 0):
        raise ManifoldError("zero sigma: volume requested at the wrong rank")
    m = s.size
    if n < m:
        raise ManifoldError(f"need n >= rank; got n={n}, rank={m}")
    log_s = np.log(s)
    iu, ju = np.triu_indices(m, k=1)
    # ln(s_i^2 + s_j^2) without overflow for large sigma
    pair = np.logaddexp(2 * log_s[iu], 2 * log_s[ju])
    return float(-0.5 * m * (m - 1) * math.log(2.0) + pair.sum()
                 + (2 * n - 2 * m + 1) * log_s.sum()
                 + log_standard_stiefel_volume(m, n))


def log_volume(m: GeneralizedStiefel) -> float:
    """Natural log of the Euclidean volume of ``m`` (rank-reduced)."""
    return log_volume_from_sigma(m.sigma, m.n)


def geometry_bounds(m: GeneralizedStiefel) -> GeometryReport:
    """Curvature, tube and injectivity bounds.

    The largest normal curvature is exactly ``1/sigma_min``; a uniform tube
    of radius ``sigma_min`` exists; and with sectional curvature at most
    ``1/sigma_min^2`` the injectivity radius is at least ``pi * sigma_min``.
    """
    s = m.sigma_min
    if not s > 0:
        raise ManifoldError("sigma_min must be positive")
    curv = 1.0 / s
    tube = s
    inj = math.pi * s
    return GeometryReport(
        max_second_fundamental_form=curv,
        tube_radius_lower=tube,
        injectivity_radius_lower=inj,
        c_bound=max(curv, 1.0 / tube, 1.0 / inj),
        log_volume=log_volume(m),
    )


def _frame(m: GeneralizedStiefel, x: np.ndarray) -> np.ndarray:
    return m.basis.conj().T @ x


def _lyapunov_diag(sigma: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``S2 G + G S2 = rhs`` for diagonal ``S2 = diag(sigma^2)``."""
    s2 = sigma**2
    return rhs / (s2[:, None] + s2[None, :])


def _check_base(m: GeneralizedStiefel, base: np.ndarray) -> None:
    if base.shape != (m.k, m.n):
        raise ManifoldError(f"base point has shape {base.shape}, expected {(m.k, m.n)}")
    err = np.linalg.norm(base @ base.conj().T - m.a)
    if err > MANIFOLD_TOL * max(1.0, float(np.linalg.norm(m.a))):
        raise ManifoldError(f"base point is off the manifold (||SS^H - A|| = {err:.3g})")


def tangent_projection(m: GeneralizedStiefel, base: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Orthogonal projection of an ambient matrix onto the tangent space at ``base``."""
    m._require_full_rank()
    z = np.asarray(z, dtype=complex)
    sb, zb = _frame(m, base), _frame(m, z)
    g = _lyapunov_diag(m.sigma, sb @ zb.conj().T + zb @ sb.conj().T)
    return z - m.basis @ (g @ sb)


def normal_curvature_vector(m: GeneralizedStiefel, base: np.ndarray,
                            tangent: np.ndarray) -> np.ndarray:
    """The normal vector ``II_S(D, D) = Gamma S`` for a unit tangent ``D``.

    ``Gamma`` is the Hermitian solution of ``A Gamma + Gamma A = -2 D D^H``.
    """
    m._require_full_rank()
    base = np.asarray(base, dtype=complex)
    d = np.asarray(tangent, dtype=complex)
    _check_base(m, base)
    if d.shape != base.shape:
        raise TangencyError(f"tangent has shape {d.shape}, expected {base.shape}")
    sym = base @ d.conj().T + d @ base.conj().T
    scale = max(1.0, float(np.linalg.norm(base)))
    if np.linalg.norm(sym) > MANIFOLD_TOL * scale:
        raise TangencyError("tangent violates S D^H + D S^H = 0")
    if abs(np.vdot(d, d).real - 1.0) > MANIFOLD_TOL:
        raise TangencyError("tangent violates g(D, D) = 1")
    sb, db = _frame(m, base), _frame(m, d)
    g = _lyapunov_diag(m.sigma, -2.0 * (db @ db.conj().T))
    return m.basis @ (g @ sb)


def second_fundamental_form(m: GeneralizedStiefel, base: np.ndarray,
                            tangent: np.ndarray) -> float:
    """``|II_S(D, D)|`` for a unit tangent vector ``D`` at ``base``.

    In the eigenbasis of ``A`` this is ``sqrt(sum_ij sigma_j^2 |Gamma_ij|^2)``
    with ``Gamma_ij = -2 (D D^H)_ij / (sigma_i^2 + sigma_j^2)``; it never
    exceeds ``1/sigma_min``.
    """
    return float(np.linalg.norm(normal_curvature_vector(m, base, tangent)))


def extremal_tangent(m: GeneralizedStiefel, base: np.ndarray, index: int = -1,
                     rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit tangent ``q_i w^H`` whose normal curvature is ``1/sigma_i``.

    ``q_i`` is the ``index``-th eigenvector of ``A`` (descending order) and
    ``w`` a unit vector orthogonal to the row space of ``base``. The default
    ``index=-1`` attains the maximum ``1/sigma_min``.
    """
    m._require_full_rank()
    if m.n == m.rank:
        raise ManifoldError("no direction orthogonal to the row space when n == rank")
    base = np.asarray(base, dtype=complex)
    _check_base(m, base)
    # orthonormal complement of the row space of base
    q, _ = np.linalg.qr(base.conj().T, mode="complete")
    comp = q[:, m.rank:]
    if rng is None:
        w = comp[:, 0]
    else:
        c = rng.standard_normal(comp.shape[1]) + 1j * rng.standard_normal(comp.shape[1])
        w = comp @ (c / np.linalg.norm(c))
    return np.outer(m.basis[:, index], w.conj())


def project_to_manifold(m: GeneralizedStiefel, x: np.ndarray) -> np.ndarray:
    """Nearest manifold point to ``x`` in Frobenius norm.

    Points are ``Q Sigma U``; the optimal ``U`` is the orthonormal polar
    factor of ``Sigma Q^H x``.
    """
    m._require_full_rank()
    y = m.sigma[:, None] * _frame(m, np.asarray(x, dtype=complex))
    left, _, right = svd(y)
    return (m.basis * m.sigma) @ (left @ right.conj().T)


def error_shape(c: float, snr: float, delta: float) -> float:
    """``delta^-1 (1 + c sqrt(snr))^delta c^2 ln^2 c``.

    This is the computable part of the entropy-approximation error bound;
    the full bound carries an extra constant that depends only on the
    dimensions and is not known in closed form.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    if not c > 0:
        raise ValueError("c must be positive")
    lc = math.log(c)
    return (1.0 + c * math.sqrt(snr)) ** delta * c * c * lc * lc / delta


def entropy_approximation(m: GeneralizedStiefel, delta: float, snr: float) -> tuple[float, float]:
    """Approximate ``h(C + Z)`` for ``C`` uniform on ``m`` plus unit complex noise.

    Returns ``(approx, shape)`` where ``approx = rank^2/2 ln(pi e) + ln Vol``
    (nats) and ``shape`` is :func:`error_shape` at ``c = c_bound``; the
    approximation error is at most ``const(rank, n) * shape``.
    """
    rep = geometry_bounds(m)
    approx = 0.5 * m.rank**2 * LOG_PI_E + rep.log_volume
    return approx, error_shape(rep.c_bound, snr, delta)
