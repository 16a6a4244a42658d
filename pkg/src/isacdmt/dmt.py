"""Diversity-multiplexing tradeoff curves and the outage-exponent program."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .wishart import AlphaSample, exponent_weights


class RegimeError(ValueError):
    """Configuration outside rank <= N_c <= T."""


@dataclass(frozen=True)
class DmtCurve:
    """Piecewise-linear tradeoff through ordered ``(r, d)`` breakpoints.

    ``d`` is zero beyond the last breakpoint.
    """

    breakpoints: tuple[tuple[float, float], ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        r = [p[0] for p in self.breakpoints]
        d = [p[1] for p in self.breakpoints]
        if len(r) < 2:
            raise ValueError("a tradeoff curve needs at least two breakpoints")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("breakpoint r must be strictly increasing")
        if any(b >= a for a, b in zip(d, d[1:])) or d[-1] != 0:
            raise ValueError("breakpoint d must strictly decrease to 0")

    @property
    def r(self) -> np.ndarray:
        return np.array([p[0] for p in self.breakpoints])

    @property
    def d(self) -> np.ndarray:
        return np.array([p[1] for p in self.breakpoints])

    @property
    def r_max(self) -> float:
        return self.breakpoints[-1][0]

    def __call__(self, r):
        """Evaluate by linear interpolation (exact at breakpoints)."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise ValueError("multiplexing gain must be nonnegative")
        out = np.interp(r_arr, self.r, self.d, right=0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OutageRegionSpec:
    t: float
    rank: int
    r: float

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if self.t < self.rank:
            raise RegimeError(f"blocklength T={self.t} must be >= rank={self.rank}")
        if self.r < 0:
            raise ValueError("multiplexing gain must be nonnegative")


def unconstrained_dmt(m: int, n_c: int) -> DmtCurve:
    """Optimal tradeoff without a waveform constraint: ``(k, (M-k)(N_c-k))``."""
    if m < 1 or n_c < 1:
        raise ValueError("antenna counts must be positive")
    ks = range(min(m, n_c) + 1)
    return DmtCurve(tuple((float(k), float((m - k) * (n_c - k))) for k in ks),
                    {"m": m, "n_c": n_c, "t": None})


def multiplexing_breakpoint(k: int, t: float) -> float:
    """``k (1 - k / 2T)``; equals ``k`` when ``t`` is infinite."""
    if math.isinf(t):
        return float(k)
    return k * (1.0 - k / (2.0 * t))


def constrained_dmt(rank: int, n_c: int, t: float) -> DmtCurve:
    """Outage exponent under the covariance constraint.

    Breakpoints ``(k (1 - k/2T), (N_c - k)(rank - k))`` for ``k = 0..rank``;
    ``t = math.inf`` gives the unconstrained curve of a rank-antenna link.
    """
    if rank < 1 or n_c < 1:
        raise ValueError("rank and N_c must be positive")
    if rank > n_c:
        raise RegimeError(f"rank={rank} > N_c={n_c} is outside the supported regime")
    if t < n_c:
        raise RegimeError(f"T={t} < N_c={n_c} is outside the supported regime")
    pts = tuple((multiplexing_breakpoint(k, t), float((n_c - k) * (rank - k)))
                for k in range(rank + 1))
    return DmtCurve(pts, {"n_c": n_c, "rank": rank, "t": t})


def mi_weights(rank: int, t: float) -> np.ndarray:
    """``2T + 1 - 2i`` for i = 1..rank."""
    return 2.0 * t + 1.0 - 2.0 * np.arange(1, rank + 1)


def mi_coefficient(alpha, t: float) -> float:
    """``sum_i (2T + 1 - 2i) (0.5 - alpha_i)^+`` for ascending ``alpha``."""
    al = np.asarray(alpha, dtype=float)
    return float(np.dot(mi_weights(al.size, t), np.maximum(0.5 - al, 0.0)))


def outage_indicator(alpha: AlphaSample, spec: OutageRegionSpec) -> bool:
    """True when the asymptotic MI coefficient is strictly below ``T r``."""
    if alpha.rank != spec.rank:
        raise ValueError(f"alpha rank {alpha.rank} != region rank {spec.rank}")
    return mi_coefficient(alpha.alpha, spec.t) < spec.t * spec.r


def _solve(c, a_ub, b_ub, bounds):
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP failed: {res.message}")
    return res


def exponent_lp(spec: OutageRegionSpec, n_c: int, tol: float = 1e-9):
    """Minimise the exponent over the outage region by linear programming.

    Solves  min  sum 2 (N_c + rank + 1 - 2i) alpha_i
            s.t. sum (2T + 1 - 2i) s_i <= T r,
                 s_i >= 0.5 - alpha_i,  s_i >= 0,
                 0 <= alpha_1 <= ... <= alpha_rank <= 0.5.

    The slack ``s_i`` stands in for ``(0.5 - alpha_i)^+``: any feasible
    ``alpha`` stays feasible with ``s_i = (0.5 - alpha_i)^+`` (the smallest
    admissible slack), so the relaxation has the same alpha-projection and
    the same optimum. Exponents above 0.5 only increase the objective, hence
    the cap. Among optimal points the lexicographically smallest ``alpha``
    is returned (one extra LP per coordinate).

    Returns:
        ``(d, alpha_opt)``.
    """
    if spec.rank > n_c:
        raise RegimeError(f"rank={spec.rank} > N_c={n_c}")
    k = spec.rank
    w = exponent_weights(k, n_c)
    cw = mi_weights(k, spec.t)
    n = 2 * k
    rows, rhs = [], []
    for i in range(k):
        row = np.zeros(n)
        row[i] = -1.0
        row[k + i] = -1.0
        rows.append(row)
        rhs.append(-0.5)
    row = np.zeros(n)
    row[k:] = cw
    rows.append(row)
    rhs.append(spec.t * spec.r)
    for i in range(k - 1):
        row = np.zeros(n)
        row[i] = 1.0
        row[i + 1] = -1.0
        rows.append(row)
        rhs.append(0.0)
    a_ub = np.array(rows)
    b_ub = np.array(rhs)
    bounds = [(0.0, 0.5)] * k + [(0.0, None)] * k
    cost = np.concatenate([w, np.zeros(k)])
    best = _solve(cost, a_ub, b_ub, bounds)
    d = float(best.fun)

    # lexicographic tie-break
    a_lex = np.vstack([a_ub, cost])
    b_lex = np.append(b_ub, d + tol * max(1.0, abs(d)))
    fixed = list(bounds)
    for i in range(k):
        c = np.zeros(n)
        c[i] = 1.0
        res = _solve(c, a_lex, b_lex, fixed)
        v = float(res.x[i])
        fixed[i] = (max(0.0, v - tol), min(0.5, v + tol))
    final = _solve(cost, a_lex, b_lex, fixed)
    # the tie-break boxes are tol-wide; restore exact ordering
    alpha = np.maximum.accumulate(np.clip(final.x[:k], 0.0, 0.5))
    return max(d, 0.0), alpha
