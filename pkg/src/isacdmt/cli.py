"""Command-line front end.

Subcommands ``dmt``, ``outage``, ``geometry``, ``bcrb`` and ``sample`` each
write a CSV table plus a JSON sidecar into ``--out``. Exit codes: 0 on
success, 2 on configuration errors, 3 when the outage Monte Carlo has too
few events to fit a slope.

Volumes and entropies are reported in bits; the column/key names carry the
unit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dmt import RegimeError, constrained_dmt, unconstrained_dmt
from .linalg import LinalgError, haar_stiefel
from .manifold import (GeneralizedStiefel, ManifoldError, entropy_approximation,
                       error_shape, geometry_bounds, uniform_sample)
from .outage import InsufficientResolutionError, estimate_outage, mi_approx_from_alpha
from .rng import default_seed, generator
from .scenario import (ConfigError, SystemConfig, load_scenario, parse_blocklength,
                       parse_list, parse_snr, set_value)
from .sensing import SensingModel, bcrb_channel_estimation, rank_bound_curve
from .wishart import UnsupportedRegimeError, alpha_from_eigs, sample_wishart_eigs

SCHEMA_VERSION = 1
LOG2E = 1.0 / math.log(2.0)
EXIT_CONFIG = 2
EXIT_RARE_EVENT = 3

FAMILY_M = 10
FAMILY_NC = 10
FAMILY_NT = (2, 4, 6, 8, 10)


# -- output helpers ---------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_outputs(out: Path, stem: str, header: list[str], rows: list[list],
                  payload: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    (out / f"{stem}.csv").write_text(buf.getvalue(), encoding="utf-8")
    doc = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, **payload}
    (out / f"{stem}.json").write_text(
        json.dumps(_clean(doc), indent=2, allow_nan=False) + "\n", encoding="utf-8")


# -- configuration ----------------------------------------------------------

_FLAG_KEYS = {
    "m": "m", "nc": "nc", "ns": "ns", "nt": "nt", "t": "t", "rank": "rank",
    "R": "R", "snr": "snr", "eta_s": "eta_s", "r": "r", "alpha": "alpha",
    "delta": "delta", "n_samples": "n_samples", "seed": "seed", "workers": "workers",
}


def build_config(args) -> SystemConfig:
    cfg = load_scenario(args.scenario) if getattr(args, "scenario", None) else SystemConfig()
    for attr, key in _FLAG_KEYS.items():
        v = getattr(args, attr, None)
        if v is not None:
            set_value(cfg, key, v)
    if cfg.seed is None:
        cfg.seed = default_seed()
    return cfg


def _need(cfg: SystemConfig, *names: str) -> None:
    missing = [n for n in names if getattr(cfg, n) in (None, [])]
    if missing:
        raise ConfigError("missing required setting(s): " + ", ".join(missing))


# -- commands ---------------------------------------------------------------

def _curve_rows(label: str, curve) -> list[list]:
    return [[r, d, label] for r, d in curve.breakpoints]


def _t_label(t: float) -> str:
    return "inf" if math.isinf(t) else str(int(t))


def cmd_dmt(args) -> int:
    curves = {}
    if args.fig2:
        cfg = build_config(args)
        _need(cfg, "t")
        m = cfg.m or FAMILY_M
        nc = cfg.nc or FAMILY_NC
        curves[f"unconstrained_M{m}_Nc{nc}"] = unconstrained_dmt(m, nc)
        for nt in FAMILY_NT:
            curves[f"rank_bound_Nt{nt}_T{_t_label(cfg.t)}"] = rank_bound_curve(nt, m, nc, cfg.t)
    else:
        cfg = build_config(args)
        _need(cfg, "m", "nc", "t")
        rank = cfg.covariance().rank if cfg.R is not None else (cfg.rank or cfg.m)
        nt = cfg.nt or rank
        curves[f"unconstrained_M{cfg.m}_Nc{cfg.nc}"] = unconstrained_dmt(cfg.m, cfg.nc)
        curves[f"constrained_rank{rank}_Nc{cfg.nc}_T{_t_label(cfg.t)}"] = \
            constrained_dmt(rank, cfg.nc, cfg.t)
        curves[f"rank_bound_Nt{nt}_T{_t_label(cfg.t)}"] = rank_bound_curve(nt, cfg.m, cfg.nc, cfg.t)
    rows = []
    for label, c in curves.items():
        rows += _curve_rows(label, c)
    payload = {
        "command": "dmt",
        "config": {**cfg.echo(), "fig2": bool(args.fig2)},
        "curves": {k: [list(p) for p in c.breakpoints] for k, c in curves.items()},
    }
    write_outputs(Path(args.out), "dmt", ["r", "d", "curve_label"], rows, payload)
    return 0


def cmd_outage(args) -> int:
    cfg = build_config(args)
    _need(cfg, "nc", "t", "r", "snr")
    cov = cfg.covariance()
    n = cfg.n_samples or 100_000
    workers = cfg.workers or 1
    err = None
    try:
        est = estimate_outage(cov, cfg.nc, cfg.t, cfg.r, cfg.snr, n, cfg.seed, workers)
    except InsufficientResolutionError as exc:
        est, err = exc.estimate, str(exc)
    d_theory = constrained_dmt(cov.rank, cfg.nc, cfg.t)(cfg.r) if cfg.t >= cfg.nc else math.nan
    slope = est.fitted_slope
    rel = abs(-slope - d_theory) / d_theory if d_theory > 0 and not math.isnan(slope) else math.nan
    rows = [[s, 10 * math.log10(s), p, ci, int(h), est.n_samples, bool(a)]
            for s, p, ci, h, a in zip(est.snr_grid, est.p_hat, est.ci_half_width,
                                      est.hits, est.admitted)]
    payload = {
        "command": "outage",
        "config": {**cfg.echo(), "n_samples": n, "workers": workers, "rank": cov.rank},
        "fitted_slope": slope,
        "slope_stderr": est.slope_stderr,
        "theory_d": d_theory,
        "relative_error": rel,
        "error": err,
    }
    write_outputs(Path(args.out), "outage",
                  ["snr_linear", "snr_db", "p_hat", "ci_half_width", "hits", "n", "admitted"],
                  rows, payload)
    if err is not None:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RARE_EVENT
    return 0


def _geometry_manifold(cfg: SystemConfig, args, snr: float | None):
    if args.sigma is not None:
        return GeneralizedStiefel.from_sigma(parse_list(args.sigma), int(args.n))
    return GeneralizedStiefel.from_alpha(cfg.alpha, snr, int(cfg.t), cfg.m)


def cmd_geometry(args) -> int:
    cfg = build_config(args)
    delta = cfg.delta if cfg.delta is not None else 0.5
    direct = args.sigma is not None
    if direct:
        if args.n is None:
            raise ConfigError("--sigma needs --n")
        snr = cfg.snr[0] if cfg.snr else 1.0
    else:
        _need(cfg, "t", "m", "alpha", "snr")
        if math.isinf(cfg.t):
            raise ConfigError("geometry needs a finite blocklength")
        snr = cfg.snr[0]
    man = _geometry_manifold(cfg, args, snr)
    rep = geometry_bounds(man)
    approx, shape = entropy_approximation(man, delta, snr)
    result = {
        "rank": man.rank,
        "n": man.n,
        "real_dimension": man.real_dimension,
        "sigma": man.sigma,
        "sigma_min": man.sigma_min,
        "max_second_fundamental_form": rep.max_second_fundamental_form,
        "tube_radius_lower": rep.tube_radius_lower,
        "injectivity_radius_lower": rep.injectivity_radius_lower,
        "c_bound": rep.c_bound,
        "log_volume_nats": rep.log_volume,
        "log2_volume_bits": rep.log_volume * LOG2E,
        "entropy_approx_bits": approx * LOG2E,
        "error_shape": shape,
    }
    if not direct:
        mi = mi_approx_from_alpha(cfg.alpha, snr, int(cfg.t), cfg.m)
        result["mi_approx_bits"] = mi.nats * LOG2E
    sweep = parse_list(args.sweep, parse_snr) if args.sweep else []
    rows = []
    for s in sweep:
        ms = man if direct else _geometry_manifold(cfg, args, s)
        r = geometry_bounds(ms)
        rows.append([s, ms.sigma_min, r.c_bound, error_shape(r.c_bound, s, delta),
                     r.log_volume * LOG2E])
    payload = {"command": "geometry", "config": {**cfg.echo(), "delta": delta,
                                                 "sigma": args.sigma, "n": args.n},
               "report": result}
    write_outputs(Path(args.out), "geometry",
                  ["snr_linear", "sigma_min", "c_bound", "error_shape", "log2_volume_bits"],
                  rows, payload)
    return 0


def cmd_bcrb(args) -> int:
    cfg = build_config(args)
    _need(cfg, "t", "eta_s")
    cov = cfg.covariance()
    m = cov.m
    ns = cfg.ns or m
    rows = []
    values = []
    for eta in cfg.eta_s:
        e = bcrb_channel_estimation(cov, SensingModel(ns, eta, int(cfg.t), m))
        values.append(e)
        rows.append([eta, 10 * math.log10(eta) if eta > 0 else -math.inf, e])
    payload = {"command": "bcrb", "config": {**cfg.echo(), "ns": ns},
               "covariance_eigenvalues": cov.eigvals, "bcrb": values}
    write_outputs(Path(args.out), "bcrb", ["eta_s_linear", "eta_s_db", "bcrb"], rows, payload)
    return 0


def _cplx(a: np.ndarray) -> dict:
    return {"real": a.real, "imag": a.imag}


def cmd_sample(args) -> int:
    cfg = build_config(args)
    rng = generator(cfg.seed)
    count = args.count
    draws = []
    rows = []
    if args.kind == "haar":
        if args.k is None or args.n is None:
            raise ConfigError("haar sampling needs --k and --n")
        for i in range(count):
            f = haar_stiefel(args.k, args.n, rng)
            draws.append(_cplx(f))
            rows.append([i, float(np.linalg.norm(f @ f.conj().T - np.eye(args.k)))])
        header = ["draw", "gram_error"]
    elif args.kind == "stiefel":
        if args.sigma is None or args.n is None:
            raise ConfigError("stiefel sampling needs --sigma and --n")
        man = GeneralizedStiefel.from_sigma(parse_list(args.sigma), args.n)
        for i in range(count):
            x = uniform_sample(man, rng)
            draws.append(_cplx(x))
            rows.append([i, float(np.linalg.norm(x @ x.conj().T - man.a))])
        header = ["draw", "gram_error"]
    else:
        _need(cfg, "nc", "snr")
        cov = cfg.covariance()
        a = sample_wishart_eigs(cov, cfg.nc, count, rng)
        al = alpha_from_eigs(a, cfg.snr[0])
        draws = [{"eigenvalues": ai, "alpha": li} for ai, li in zip(a, al)]
        rows = [[i, *li] for i, li in enumerate(al)]
        header = ["draw"] + [f"alpha_{j + 1}" for j in range(cov.rank)]
    payload = {"command": "sample", "config": {**cfg.echo(), "kind": args.kind, "count": count},
               "draws": draws}
    write_outputs(Path(args.out), f"sample_{args.kind}", header, rows, payload)
    return 0


# -- parser -----------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="key = value scenario file")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--seed", type=int, help="RNG seed (default: $ISACDMT_SEED)")
    common.add_argument("--m", type=int, help="transmit antennas M")
    common.add_argument("--nc", type=int, help="communication receive antennas N_c")
    common.add_argument("--t", help="blocklength T (integer or 'inf')")
    common.add_argument("--rank", type=int, help="rank of R (R = scaled diag(1..1, 0..0))")
    common.add_argument("--R", help="covariance: identity | diag:[...] | matrix literal")

    p = argparse.ArgumentParser(prog="isacdmt", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dmt", parents=[common], help="tradeoff curves")
    d.add_argument("--nt", type=int, help="sensing targets for the rank-bound curve")
    d.add_argument("--fig2", action="store_true",
                   help="rank-bound family N_t in {2,4,6,8,10}, M = N_c = 10")
    d.set_defaults(func=cmd_dmt)

    o = sub.add_parser("outage", parents=[common], help="outage Monte Carlo")
    o.add_argument("--r", type=float, help="multiplexing gain")
    o.add_argument("--snr", help="SNR grid, e.g. 30dB,40dB,50dB")
    o.add_argument("--n-samples", dest="n_samples", type=float, help="channel draws")
    o.add_argument("--workers", type=int, help="worker processes")
    o.set_defaults(func=cmd_outage)

    g = sub.add_parser("geometry", parents=[common], help="manifold geometry report")
    g.add_argument("--alpha", help="log-singular exponents, comma separated")
    g.add_argument("--snr", help="SNR for the report")
    g.add_argument("--delta", type=float, help="error-bound exponent delta in (0, 1]")
    g.add_argument("--sweep", help="SNR values for the error-shape sweep")
    g.add_argument("--sigma", help="explicit sigma (with --n) instead of alpha/SNR")
    g.add_argument("--n", type=int, help="column count for --sigma")
    g.set_defaults(func=cmd_geometry)

    b = sub.add_parser("bcrb", parents=[common], help="channel-estimation BCRB")
    b.add_argument("--ns", type=int, help="sensing receive antennas (default: M)")
    b.add_argument("--eta-s", dest="eta_s", help="sensing SNR values")
    b.set_defaults(func=cmd_bcrb)

    s = sub.add_parser("sample", parents=[common], help="dump random draws")
    s.add_argument("--kind", choices=("haar", "stiefel", "wishart"), required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--sigma")
    s.add_argument("--snr")
    s.add_argument("--count", type=int, default=10)
    s.set_defaults(func=cmd_sample)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, RegimeError, UnsupportedRegimeError, ManifoldError,
            LinalgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
