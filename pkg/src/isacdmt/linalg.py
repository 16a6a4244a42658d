"""Dense complex matrix kernel.

Matrices are plain ``numpy`` complex128 arrays. Every random routine takes an
explicit :class:`numpy.random.Generator` so that sample streams are
reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DECOMP_RTOL = 1e-10
HERMITIAN_TOL = 1e-12


class LinalgError(ValueError):
    """Invalid input to a linear-algebra routine."""


class NotHermitianError(LinalgError):
    pass


class SvdConvergenceError(ArithmeticError):
    """The SVD iteration failed to converge."""


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition ``A = V diag(eigenvalues) V^H`` (descending)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_dims(*dims: int) -> None:
    for d in dims:
        if int(d) != d or d < 1:
            raise LinalgError(f"matrix dimensions must be positive integers, got {d!r}")


def _check_finite(a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise LinalgError("matrix has non-finite entries")


def sample_ginibre(rows: int, cols: int, rng: np.random.Generator,
                   size: int | None = None) -> np.ndarray:
    """Draw a matrix with i.i.d. CN(0, 1) entries.

    Real and imaginary parts are independent N(0, 1/2). With ``size`` given,
    a stack of shape ``(size, rows, cols)`` is returned.
    """
    _check_dims(rows, cols)
    shape = (rows, cols) if size is None else (size, rows, cols)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def haar_stiefel(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``F`` (k x n) from the Haar measure on ``{F : F F^H = I_k}``.

    A Ginibre draw is orthonormalised by QR and the phases of the diagonal of
    the triangular factor are absorbed into ``Q``; without that phase fix the
    result is not unitarily invariant.
    """
    _check_dims(k, n)
    if k > n:
        raise LinalgError(f"Stiefel sample needs k <= n, got k={k}, n={n}")
    g = sample_ginibre(n, k, rng)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    q = q * ph
    return np.ascontiguousarray(q.conj().T)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    return haar_stiefel(n, n, rng)


def svd(a: np.ndarray, full_matrices: bool = False):
    """Singular value decomposition ``a = U diag(s) V^H``.

    Returns ``(U, s, V)`` with ``s`` descending and nonnegative. Note that
    ``V`` (not ``V^H``) is returned.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise LinalgError("svd expects a 2-D matrix")
    _check_finite(a)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise SvdConvergenceError(str(exc)) from exc
    return u, s, vh.conj().T


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.linalg.norm(a)))
    return float(np.linalg.norm(a - a.conj().T)) <= tol * scale


def hermitian_eig(a: np.ndarray, tol: float = HERMITIAN_TOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrised before decomposition; deviations from
    Hermitian symmetry beyond ``tol`` (relative to ``max(1, ||a||_F)``) raise
    :class:`NotHermitianError`.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise LinalgError(f"expected a square matrix, got shape {a.shape}")
    _check_finite(a)
    if not is_hermitian(a, tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    return HermitianEig(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix (negative round-off clipped)."""
    eig = hermitian_eig(a)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    v = eig.eigenvectors
    return (v * np.sqrt(lam)) @ v.conj().T
