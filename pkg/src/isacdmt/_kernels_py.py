"""Pure-numpy versions of the Monte Carlo hot loops.

These are the reference implementations; ``_kernels.pyx`` mirrors them.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 15
_TINY = np.finfo(float).tiny


def gram_eigvalsh(h: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``L^{1/2} H^H H L^{1/2}`` for a stack ``h`` of shape (N, n, m).

    Computed as squared singular values of ``H L^{1/2}``, which keeps the
    small eigenvalues relatively accurate. Output is (N, m), descending.
    """
    h = np.asarray(h, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    hs = h * np.sqrt(lam)
    if hs.shape[-1] == 1:
        a = np.sum(hs.real**2 + hs.imag**2, axis=-2)
    else:
        s = np.linalg.svd(hs, compute_uv=False)
        a = s * s
    return np.maximum(a, _TINY)


def outage_counts(a: np.ndarray, log_snr: np.ndarray, t: float, r: float) -> np.ndarray:
    """Per-SNR count of samples whose MI coefficient falls below ``t * r``.

    ``a`` is (N, m) descending; ``log_snr`` holds ``ln(snr)`` per grid point.
    """
    a = np.asarray(a, dtype=float)
    log_snr = np.asarray(log_snr, dtype=float)
    m = a.shape[1]
    w = 2.0 * t + 1.0 - 2.0 * np.arange(1, m + 1)
    thr = t * r
    counts = np.zeros(log_snr.size, dtype=np.int64)
    for lo in range(0, a.shape[0], _CHUNK):
        la = np.log(a[lo:lo + _CHUNK])
        alpha = -la[:, None, :] / (2.0 * log_snr[None, :, None])
        coef = np.maximum(0.5 - alpha, 0.0) @ w
        counts += np.count_nonzero(coef < thr, axis=0)
    return counts
