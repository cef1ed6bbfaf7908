"""Readers for the run artifacts the report consumes.

These parse the documented file formats directly (CSV with leading ``#``
comment lines, strict JSON with nulls for non-finite values) rather than
importing the simulation package, so the report stays independently
testable against fixture files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError

__all__ = [
    "Series", "Profile", "CoolingFit", "ConvergenceFit",
    "read_series", "read_profile", "read_l1",
    "read_cooling_fit", "read_convergence_fit", "read_json",
]

REGIMES = ("sub-critical", "critical", "super-critical")


def _read_table(path):
    """CSV body as (comments, header, rows of strings)."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    comments, header, rows = [], None, []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line)
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = cells
        else:
            rows.append(cells)
    if header is None:
        raise InputError(f"empty artifact: {path}")
    return comments, header, rows


def _column(header, rows, name, path):
    if name not in header:
        raise InputError(f"missing column {name!r} in {path}")
    j = header.index(name)
    out = np.empty(len(rows))
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise InputError(f"ragged row {k + 1} in {path}")
        try:
            out[k] = float(row[j])
        except ValueError as exc:
            raise InputError(
                f"non-numeric value {row[j]!r} in column {name!r} "
                f"of {path}") from exc
    return out


@dataclass(frozen=True)
class Series:
    """Time series of energy and moments; extra columns kept by name."""
    t: np.ndarray
    E: np.ndarray
    columns: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)


def read_series(path) -> Series:
    comments, header, rows = _read_table(path)
    if not rows:
        raise InputError(f"series in {path} has no data rows")
    t = _column(header, rows, "t", path)
    e = _column(header, rows, "E", path)
    extra = {}
    for name in header:
        if name in ("t", "E"):
            continue
        extra[name] = _column(header, rows, name, path)
    return Series(t=t, E=e, columns=extra)


@dataclass(frozen=True)
class Profile:
    """Speed histogram: contiguous finite bins plus an overflow mass."""
    edges: np.ndarray        # n+1 finite, strictly increasing
    masses: np.ndarray       # n
    overflow: float
    n_samples: int | None

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def density(self):
        return self.masses / self.widths

    @property
    def total_mass(self):
        return float(np.sum(self.masses) + self.overflow)


def read_profile(path) -> Profile:
    comments, header, rows = _read_table(path)
    if header != ["bin_lo", "bin_hi", "mass"]:
        raise InputError(f"unexpected profile columns in {path}: {header}")
    if not rows:
        raise InputError(f"profile in {path} has no bins")
    n_samples = None
    for line in comments:
        if "n_samples=" in line:
            try:
                n_samples = int(line.split("n_samples=", 1)[1])
            except ValueError as exc:
                raise InputError(f"bad n_samples comment in {path}") from exc
    lo = _column(header, rows, "bin_lo", path)
    hi = _column(header, rows, "bin_hi", path)
    mass = _column(header, rows, "mass", path)
    overflow = 0.0
    if math.isinf(hi[-1]):
        overflow = float(mass[-1])
        lo, hi, mass = lo[:-1], hi[:-1], mass[:-1]
    if len(lo) == 0:
        raise InputError(f"profile in {path} has no finite bins")
    if np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)):
        raise InputError(f"non-finite bin edge inside {path}")
    if np.any(hi <= lo):
        raise InputError(f"profile bins in {path} are not increasing")
    if np.any(lo[1:] != hi[:-1]):
        raise InputError(f"profile bins in {path} are not contiguous")
    edges = np.concatenate([lo, hi[-1:]])
    return Profile(edges=edges, masses=mass, overflow=overflow,
                   n_samples=n_samples)


def read_l1(path):
    """Distance series as (s, l1) arrays."""
    _, header, rows = _read_table(path)
    if header != ["s", "l1"]:
        raise InputError(f"unexpected l1 columns in {path}: {header}")
    if not rows:
        raise InputError(f"l1 series in {path} has no data rows")
    s = _column(header, rows, "s", path)
    l1 = _column(header, rows, "l1", path)
    return s, l1


def read_json(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"expected a JSON object in {path}")
    return payload


def _as_float(payload: dict, key: str, path) -> float:
    """JSON numbers with null standing in for non-finite values."""
    if key not in payload:
        raise InputError(f"missing fit field {key!r} in {path}")
    v = payload[key]
    if v is None:
        return math.nan
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"fit field {key!r} in {path} is not a number")
    return float(v)


@dataclass(frozen=True)
class CoolingFit:
    """Cooling fit parameters as written by the fit subcommand."""
    a: float
    alpha: float
    regime: str
    slope: float
    intercept: float
    r2: float
    reliable: bool
    exponent_hat: float
    tc_hat: float
    fit_window: tuple
    raw: dict


def read_cooling_fit(path) -> CoolingFit:
    payload = read_json(path)
    if "fit" not in payload or not isinstance(payload["fit"], dict):
        raise InputError(f"missing fit object in {path}")
    fit = payload["fit"]
    regime = fit.get("regime")
    if regime not in REGIMES:
        raise InputError(f"unknown regime {regime!r} in {path}")
    window = fit.get("fit_window", [math.nan, math.nan])
    if not isinstance(window, (list, tuple)) or len(window) != 2:
        raise InputError(f"bad fit_window in {path}")
    return CoolingFit(
        a=_as_float(fit, "a", path),
        alpha=_as_float(fit, "alpha", path),
        regime=regime,
        slope=_as_float(fit, "slope", path),
        intercept=_as_float(fit, "intercept", path),
        r2=_as_float(fit, "r2", path),
        reliable=bool(fit.get("reliable", False)),
        exponent_hat=_as_float(fit, "exponent_hat", path),
        tc_hat=_as_float(fit, "tc_hat", path),
        fit_window=(float(window[0]) if window[0] is not None else math.nan,
                    float(window[1]) if window[1] is not None else math.nan),
        raw=payload,
    )


@dataclass(frozen=True)
class ConvergenceFit:
    """Exponential decay fit as written by the convergence subcommand."""
    rate_hat: float
    noise_floor: float
    r2: float
    n_points: int
    reliable: bool
    tau: float
    raw: dict


def read_convergence_fit(path) -> ConvergenceFit:
    payload = read_json(path)
    if "fit" not in payload or not isinstance(payload["fit"], dict):
        raise InputError(f"missing fit object in {path}")
    fit = payload["fit"]
    n_points = fit.get("n_points", 0)
    if not isinstance(n_points, int) or isinstance(n_points, bool):
        raise InputError(f"fit field 'n_points' in {path} is not an integer")
    return ConvergenceFit(
        rate_hat=_as_float(fit, "rate_hat", path),
        noise_floor=_as_float(fit, "noise_floor", path),
        r2=_as_float(fit, "r2", path),
        n_points=n_points,
        reliable=bool(fit.get("reliable", False)),
        tau=_as_float(payload, "tau", path) if "tau" in payload else math.nan,
        raw=payload,
    )
