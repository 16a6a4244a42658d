# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Monte Carlo hot loops; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, fabs, hypot, fmax

cnp.import_array()

cdef double _TINY = 2.2250738585072014e-308


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _jacobi_sv2(double complex[:, ::1] x, double[::1] out) noexcept nogil:
    # One-sided (Hestenes) Jacobi on the columns of x; writes squared
    # column norms after convergence, i.e. squared singular values.
    cdef Py_ssize_t n = x.shape[0], m = x.shape[1]
    cdef Py_ssize_t p, q, i, sweep
    cdef double alpha, beta, g, zeta, t, c, s, off
    cdef double complex gam, ph, xp, xq
    for sweep in range(60):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                alpha = 0.0
                beta = 0.0
                gam = 0.0
                for i in range(n):
                    alpha += _abs2(x[i, p])
                    beta += _abs2(x[i, q])
                    gam = gam + x[i, p].conjugate() * x[i, q]
                g = hypot(gam.real, gam.imag)
                if g == 0.0 or g <= 1e-16 * sqrt(alpha * beta):
                    continue
                off = fmax(off, g / sqrt(alpha * beta))
                ph = gam / g
                zeta = (beta - alpha) / (2.0 * g)
                if zeta >= 0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for i in range(n):
                    xp = x[i, p]
                    xq = x[i, q] * ph.conjugate()
                    x[i, p] = c * xp - s * xq
                    x[i, q] = s * xp + c * xq
        if off <= 1e-15:
            break
    for q in range(m):
        alpha = 0.0
        for i in range(n):
            alpha += _abs2(x[i, q])
        out[q] = alpha if alpha > _TINY else _TINY


def gram_eigvalsh(h, lam):
    """Eigenvalues of ``L^{1/2} H^H H L^{1/2}`` per stacked ``H`` (N, n, m); (N, m) descending."""
    cdef double complex[:, :, ::1] hv = np.ascontiguousarray(h, dtype=np.complex128)
    cdef double[::1] lv = np.ascontiguousarray(lam, dtype=np.float64)
    cdef Py_ssize_t N = hv.shape[0], n = hv.shape[1], m = hv.shape[2]
    cdef Py_ssize_t k, i, j, jj
    cdef double tmp
    res = np.empty((N, m), dtype=np.float64)
    cdef double[:, ::1] rv = res
    cdef double[::1] sl = np.sqrt(np.asarray(lv))
    cdef double complex[:, ::1] work = np.empty((n, m), dtype=np.complex128)
    cdef double[::1] buf = np.empty(m, dtype=np.float64)
    with nogil:
        for k in range(N):
            if m == 1:
                tmp = 0.0
                for i in range(n):
                    tmp += _abs2(hv[k, i, 0])
                tmp *= lv[0]
                rv[k, 0] = tmp if tmp > _TINY else _TINY
                continue
            for i in range(n):
                for j in range(m):
                    work[i, j] = hv[k, i, j] * sl[j]
            _jacobi_sv2(work, buf)
            # insertion sort, descending
            for j in range(1, m):
                tmp = buf[j]
                jj = j - 1
                while jj >= 0 and buf[jj] < tmp:
                    buf[jj + 1] = buf[jj]
                    jj -= 1
                buf[jj + 1] = tmp
            for j in range(m):
                rv[k, j] = buf[j]
    return res


def outage_counts(a, log_snr, double t, double r):
    """Per-SNR count of samples whose MI coefficient falls below ``t * r``."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] lg = np.ascontiguousarray(log_snr, dtype=np.float64)
    cdef Py_ssize_t N = av.shape[0], m = av.shape[1], G = lg.shape[0]
    cdef Py_ssize_t k, g, i
    cdef double thr = t * r, coef, alpha
    counts = np.zeros(G, dtype=np.int64)
    cdef cnp.int64_t[::1] cv = counts
    cdef double[::1] la = np.empty(m, dtype=np.float64)
    cdef double[::1] inv2 = np.empty(G, dtype=np.float64)
    for g in range(G):
        inv2[g] = 1.0 / (2.0 * lg[g])
    with nogil:
        for k in range(N):
            for i in range(m):
                la[i] = log(av[k, i])
            for g in range(G):
                coef = 0.0
                for i in range(m):
                    alpha = -la[i] * inv2[g]
                    if alpha < 0.5:
                        coef += (2.0 * t - 1.0 - 2.0 * i) * (0.5 - alpha)
                if coef < thr:
                    cv[g] += 1
    return counts
