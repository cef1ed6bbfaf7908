"""Artifact readers and writers: CSV series/profiles/maps and summary JSON.

All floats are written with 17 significant digits so values round-trip
exactly through the text format.  Every artifact carries the config hash in
a leading comment line (CSV) or a top-level field (JSON).
"""

from __future__ import annotations

import hashlib
import json
import platform
from pathlib import Path

import numpy as np

from .ensemble import MomentSeries, ProfileHistogram, VelocityEnsemble
from .errors import InputError
from .scaling import ScalingMap

__all__ = [
    "config_hash",
    "write_series_csv", "read_series_csv",
    "write_profile_csv", "read_profile_csv",
    "write_map_csv", "read_map_csv",
    "write_l1_csv", "read_l1_csv",
    "write_snapshot_csv", "read_snapshot_csv",
    "write_summary_json", "read_summary_json",
    "version_stamp",
]

FLOAT_FMT = "%.17g"


def config_hash(config: dict) -> str:
    """Short stable digest of a config mapping (12 hex chars)."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def version_stamp() -> dict:
    from . import __version__
    return {
        "package": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def _fmt(x) -> str:
    return FLOAT_FMT % float(x)


def _read_table(path):
    """Comment-aware CSV read: returns (hash or None, header row, str rows)."""
    found_hash = None
    header = None
    rows = []
    try:
        fh = open(path, "r")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("config_hash="):
                    found_hash = body.split("=", 1)[1]
                continue
            cells = line.split(",")
            if header is None:
                header = cells
            else:
                rows.append(cells)
    if header is None:
        raise InputError(f"no header row in {path}")
    return found_hash, header, rows


def _momentum_columns(dim: int):
    named = ["px", "py", "pz"]
    if dim <= 3:
        return named[:dim]
    return named + [f"p{k}" for k in range(3, dim)]


def write_series_csv(path, series: MomentSeries, cfg_hash: str = "") -> None:
    t = series.t
    e = series.E
    mh = series.m_half
    m32 = series.m_three_half
    p = series.momentum
    nc = series.n_collisions
    dt = series.dt
    cols = ["t", "E", "m_half", "m_three_half"]
    cols += _momentum_columns(p.shape[1])
    cols += ["n_coll", "dt"]
    with open(path, "w") as fh:
        if cfg_hash:
            fh.write(f"# config_hash={cfg_hash}\n")
        fh.write(",".join(cols) + "\n")
        for k in range(len(t)):
            cells = [_fmt(t[k]), _fmt(e[k]), _fmt(mh[k]), _fmt(m32[k])]
            cells += [_fmt(x) for x in p[k]]
            cells += [str(int(nc[k])), _fmt(dt[k])]
            fh.write(",".join(cells) + "\n")


def read_series_csv(path) -> MomentSeries:
    _, header, rows = _read_table(path)
    fixed_lead = ["t", "E", "m_half", "m_three_half"]
    if header[:4] != fixed_lead or header[-2:] != ["n_coll", "dt"]:
        raise InputError(f"unexpected series columns in {path}: {header}")
    dim = len(header) - 6
    if dim < 1 or header[4:4 + dim] != _momentum_columns(dim):
        raise InputError(f"unexpected momentum columns in {path}")
    series = MomentSeries(dim)
    for cells in rows:
        if len(cells) != len(header):
            raise InputError(f"ragged row in {path}")
        vals = [float(c) for c in cells]
        series.append(
            t=vals[0], energy=vals[1], m_half=vals[2], m_three_half=vals[3],
            momentum=np.array(vals[4:4 + dim]),
            n_collisions=int(vals[4 + dim]), dt=vals[5 + dim])
    return series


def write_profile_csv(path, hist: ProfileHistogram, cfg_hash: str = "",
                      n_samples: int = None) -> None:
    """Profile rows are (bin_lo, bin_hi, mass); the overflow row has
    bin_hi = inf."""
    with open(path, "w") as fh:
        if cfg_hash:
            fh.write(f"# config_hash={cfg_hash}\n")
        ns = hist.n_samples if n_samples is None else n_samples
        fh.write(f"# n_samples={ns}\n")
        fh.write("bin_lo,bin_hi,mass\n")
        lo = hist.bin_edges[:-1]
        hi = hist.bin_edges[1:]
        for k in range(len(hist.masses)):
            fh.write(f"{_fmt(lo[k])},{_fmt(hi[k])},{_fmt(hist.masses[k])}\n")
        fh.write(f"{_fmt(hist.bin_edges[-1])},inf,{_fmt(hist.overflow)}\n")


def read_profile_csv(path) -> ProfileHistogram:
    n_samples = 1
    with open(path, "r") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#") and "n_samples=" in line:
                n_samples = int(line.split("n_samples=", 1)[1])
    _, header, rows = _read_table(path)
    if header != ["bin_lo", "bin_hi", "mass"]:
        raise InputError(f"unexpected profile columns in {path}: {header}")
    if len(rows) < 2:
        raise InputError(f"profile in {path} has no bins")
    body, last = rows[:-1], rows[-1]
    if float(last[1]) != np.inf:
        raise InputError(f"profile in {path} lacks the overflow row")
    edges = [float(r[0]) for r in body] + [float(last[0])]
    masses = [float(r[2]) for r in body]
    return ProfileHistogram(
        bin_edges=np.array(edges), masses=np.array(masses),
        overflow=float(last[2]), n_samples=n_samples)


def write_map_csv(path, smap: ScalingMap, cfg_hash: str = "") -> None:
    with open(path, "w") as fh:
        if cfg_hash:
            fh.write(f"# config_hash={cfg_hash}\n")
        fh.write("t,V,T\n")
        for k in range(len(smap.t_grid)):
            fh.write(f"{_fmt(smap.t_grid[k])},{_fmt(smap.V[k])},"
                     f"{_fmt(smap.T[k])}\n")


def read_map_csv(path, tau: float, a: float) -> ScalingMap:
    _, header, rows = _read_table(path)
    if header != ["t", "V", "T"]:
        raise InputError(f"unexpected map columns in {path}: {header}")
    data = np.array([[float(c) for c in r] for r in rows])
    return ScalingMap(t_grid=data[:, 0], V=data[:, 1], T=data[:, 2],
                      tau=tau, a=a)


def write_l1_csv(path, s, l1, cfg_hash: str = "") -> None:
    s = np.asarray(s, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    if s.shape != l1.shape:
        raise InputError("s and l1 must have matching shapes")
    with open(path, "w") as fh:
        if cfg_hash:
            fh.write(f"# config_hash={cfg_hash}\n")
        fh.write("s,l1\n")
        for k in range(len(s)):
            fh.write(f"{_fmt(s[k])},{_fmt(l1[k])}\n")


def read_l1_csv(path):
    _, header, rows = _read_table(path)
    if header != ["s", "l1"]:
        raise InputError(f"unexpected l1 columns in {path}: {header}")
    data = np.array([[float(c) for c in r] for r in rows])
    return data[:, 0], data[:, 1]


def write_snapshot_csv(path, ens: VelocityEnsemble,
                       cfg_hash: str = "") -> None:
    """Header row carries (d, N); each following row is one velocity."""
    with open(path, "w") as fh:
        if cfg_hash:
            fh.write(f"# config_hash={cfg_hash}\n")
        fh.write(f"{ens.dim},{ens.n}\n")
        for row in ens.velocities:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_snapshot_csv(path) -> VelocityEnsemble:
    _, header, rows = _read_table(path)
    if len(header) != 2:
        raise InputError(f"snapshot header in {path} must be d,N")
    try:
        dim, n = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InputError(f"snapshot header in {path} must be d,N") from exc
    if len(rows) != n:
        raise InputError(f"snapshot in {path} has {len(rows)} rows, "
                         f"header says {n}")
    vel = np.array([[float(c) for c in r] for r in rows])
    if vel.shape != (n, dim):
        raise InputError(f"snapshot rows in {path} do not match header")
    return VelocityEnsemble(vel)


def write_summary_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_summary_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {path}")
    with open(p, "r") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON in {path}: {exc}") from exc
