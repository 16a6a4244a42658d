"""Scenario files and value parsing shared by the command-line tools.

A scenario file is flat ``key = value`` text; ``#`` starts a comment::

    m = 3
    nc = 3
    t = 10
    R = diag:[2, 1, 0]
    snr = 30dB, 40dB, 50dB
    r = 0.25
    seed = 7

Covariances are ``identity``, ``diag:[...]`` or a nested-list matrix
literal (complex entries like ``1+2j`` allowed). SNR values take a ``dB``
suffix or are linear.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .wishart import CovarianceSpec


class ConfigError(ValueError):
    pass


def parse_snr(text) -> float:
    """``"30dB"`` -> 1000.0; plain numbers are linear."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    try:
        if s.lower().endswith("db"):
            return 10.0 ** (float(s[:-2]) / 10.0)
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse SNR value {text!r}") from None


def parse_list(text, conv=float) -> list:
    if isinstance(text, (list, tuple)):
        return [conv(v) for v in text]
    s = str(text).strip().strip("[]")
    try:
        return [conv(v.strip()) for v in s.split(",") if v.strip()]
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"cannot parse list {text!r}") from None


def parse_blocklength(text) -> float:
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo"):
        return math.inf
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"cannot parse blocklength {text!r}") from None
    if v != int(v) or v < 1:
        raise ConfigError(f"blocklength must be a positive integer or 'inf', got {text!r}")
    return float(int(v))


def parse_covariance(text: str, m: int | None = None) -> CovarianceSpec:
    s = str(text).strip()
    try:
        if s.lower() == "identity":
            if m is None:
                raise ConfigError("R = identity needs the antenna count m")
            return CovarianceSpec.identity(m)
        if s.lower().startswith("diag:"):
            vals = ast.literal_eval(s[5:].strip())
            return CovarianceSpec.diag(np.atleast_1d(np.asarray(vals, dtype=float)))
        mat = np.asarray(ast.literal_eval(s), dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ConfigError(f"covariance literal must be a square matrix, got shape {mat.shape}")
        return CovarianceSpec.from_matrix(mat)
    except ConfigError:
        raise
    except (ValueError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"bad covariance {text!r}: {exc}") from None


@dataclass
class SystemConfig:
    """One scenario: antenna counts, blocklength, SNRs and campaign settings."""

    m: int | None = None
    nc: int | None = None
    ns: int | None = None
    nt: int | None = None
    t: float | None = None
    rank: int | None = None
    R: str | None = None
    snr: list = field(default_factory=list)
    eta_s: list = field(default_factory=list)
    r: float | None = None
    alpha: list = field(default_factory=list)
    delta: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    workers: int | None = None

    def covariance(self) -> CovarianceSpec:
        """The transmit covariance; ``rank`` alone means ``diag(1,..,1,0,..)``."""
        if self.R is not None:
            cov = parse_covariance(self.R, self.m)
            if self.m is not None and cov.m != self.m:
                raise ConfigError(f"R is {cov.m}x{cov.m} but m = {self.m}")
            return cov
        if self.m is None:
            raise ConfigError("need m (and rank or R)")
        rank = self.m if self.rank is None else self.rank
        if not 1 <= rank <= self.m:
            raise ConfigError(f"rank must lie in 1..m, got {rank}")
        return CovarianceSpec.diag([1.0] * rank + [0.0] * (self.m - rank))

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == []:
                continue
            if isinstance(v, float) and math.isinf(v):
                v = "inf"
            out[f.name] = v
        return out


def _check_covariance(raw) -> str:
    text = str(raw).strip()
    if text.lower() != "identity":
        parse_covariance(text)
    return text


_CONVERTERS = {
    "m": int, "nc": int, "ns": int, "nt": int,
    "t": parse_blocklength,
    "rank": int,
    "R": _check_covariance,
    "snr": lambda v: parse_list(v, parse_snr),
    "eta_s": lambda v: parse_list(v, parse_snr),
    "r": float,
    "alpha": lambda v: parse_list(v, float),
    "delta": float,
    "n_samples": lambda v: int(float(v)),
    "seed": int,
    "workers": int,
}


def set_value(cfg: SystemConfig, key: str, raw) -> None:
    if key not in _CONVERTERS:
        raise ConfigError(f"unknown key {key!r}")
    try:
        setattr(cfg, key, _CONVERTERS[key](raw))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from None


def load_scenario(path: str | Path, cfg: SystemConfig | None = None) -> SystemConfig:
    """Read a scenario file; errors are prefixed with ``path:line``."""
    cfg = cfg or SystemConfig()
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    for no, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{no}: expected 'key = value'")
        key, raw = (p.strip() for p in body.split("=", 1))
        try:
            set_value(cfg, key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{path}:{no}: {exc}") from None
    return cfg
