"""Command-line orchestration: subcommands, config handling, artifacts.

Subcommands:
    simulate     physical-frame cooling run
    rescaled     self-similar-frame run with profile extraction
    coupled      physical run + scaling map + rescaled partner + coupling check
    fit          cooling-law fit on an emitted series CSV
    convergence  exponential fit of the L1 profile-distance decay

Exit codes: 0 success, 1 numerical failure during a run, 2 usage error.
All runs are single-threaded and deterministic: the same config and seed
emit byte-identical artifacts.  The run-summary JSON doubles as a config
file (pass it back via --config) for exact re-runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as cio
from .analysis import (bootstrap_noise_floor, check_moment_bound,
                       fit_convergence, fit_cooling)
from .dsmc import run_physical
from .errors import CoolgasError, InputError, UsageError
from .kernel import KernelConfig, isotropic_b1, linear_b1
from .rescaled import (estimate_stationary_energy, profile_distance_series,
                       run_rescaled)
from .scaling import build_scaling_map, verify_energy_coupling

__all__ = ["RunConfig", "parse_config", "run", "main"]

OUTDIR_ENV = "COOLGAS_OUTDIR"
MODES = ("physical", "rescaled", "coupled", "fit", "convergence")
SUBCOMMANDS = {"simulate": "physical", "rescaled": "rescaled",
               "coupled": "coupled", "fit": "fit",
               "convergence": "convergence"}


@dataclass
class RunConfig:
    mode: str
    e: float
    a: float = 0.0
    tau: float = None           # default 1 - e, resolved in validate()
    d: int = 3
    n: int = 20_000
    seed: int = 0
    b1: str = "isotropic"       # or "linear:<coefficient>"
    c_target: float = 0.05
    epsilon_stop: float = 1e-6
    t_max: float = 100.0
    s_max: float = 100.0
    avg_window: float = None
    bins: int = 64
    v_max: float = None
    snapshot_stride: int = 0
    record_ds: float = None
    profile_ds: float = None
    init: str = "maxwellian"
    allow_elastic: bool = False
    transient_fraction: float = 0.2
    input: str = None           # fit / convergence source artifact
    outdir: str = None          # not part of the config hash

    def to_dict(self) -> dict:
        """Run-defining fields only; the output directory is excluded so
        re-runs into a different directory hash identically."""
        d = dataclasses.asdict(self)
        d.pop("outdir")
        return d

    def hash(self) -> str:
        return cio.config_hash(self.to_dict())

    def kernel_config(self) -> KernelConfig:
        tau = (1.0 - self.e) if self.tau is None else self.tau
        if self.b1 == "isotropic":
            return KernelConfig.isotropic(
                self.e, a=self.a, tau=tau, dim=self.d,
                allow_elastic=self.allow_elastic)
        if self.b1.startswith("linear:"):
            try:
                coeff = float(self.b1.split(":", 1)[1])
            except ValueError:
                raise InputError(f"bad linear-anisotropy coefficient "
                                 f"in {self.b1!r}")
            return KernelConfig.linear_anisotropy(
                coeff, self.e, a=self.a, tau=tau, dim=self.d,
                allow_elastic=self.allow_elastic)
        raise InputError(f"unknown b1 selector {self.b1!r}; expected "
                         f"'isotropic' or 'linear:<coefficient>'")

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")
        if self.mode in ("physical", "rescaled", "coupled"):
            self.kernel_config()    # range checks on e, a, tau, b1, d
            if self.n < 2:
                raise InputError("n must be >= 2")
            if not self.c_target > 0:
                raise InputError("c_target must be > 0")
            if not (isinstance(self.seed, int) and self.seed >= 0):
                raise InputError("seed must be a nonnegative integer")
        if self.mode in ("fit", "convergence") and self.input is None:
            raise InputError(f"mode {self.mode} needs --input")
        if self.bins < 8:
            raise InputError("bins must be >= 8")
        if self.snapshot_stride < 0:
            raise InputError("snapshot_stride must be >= 0")
        if not (0.0 <= self.transient_fraction < 1.0):
            raise InputError("transient_fraction must lie in [0, 1)")
        return self


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_FLOAT_OPTIONAL = {"tau", "avg_window", "v_max", "record_ds", "profile_ds"}


def _add_run_flags(p: argparse.ArgumentParser, *, needs_e: bool) -> None:
    p.add_argument("--config", help="JSON config or an emitted run summary")
    p.add_argument("--e", type=float, required=False,
                   help="restitution coefficient in [0, 1)"
                        + (" (required unless given via --config)"
                           if needs_e else ""))
    p.add_argument("--a", type=float, help="dissipation exponent (default 0)")
    p.add_argument("--tau", type=float, help="rescaling rate (default 1-e)")
    p.add_argument("--d", type=int, help="dimension (default 3)")
    p.add_argument("--n", type=int, help="particle count (default 20000)")
    p.add_argument("--seed", type=int, help="RNG seed (default 0)")
    p.add_argument("--b1", help="angular weight: isotropic | linear:<c>")
    p.add_argument("--c-target", dest="c_target", type=float,
                   help="collisions per particle per step target")
    p.add_argument("--init", choices=("maxwellian", "uniform-ball",
                                      "two-temperature"))
    p.add_argument("--allow-elastic", dest="allow_elastic",
                   action="store_true", default=None)
    p.add_argument("--outdir", help=f"output directory "
                                    f"(default ${OUTDIR_ENV} or .)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coolgas",
        description="Stochastic-particle runs for homogeneous inelastic "
                    "cooling with energy-dependent collision rates.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="physical-frame cooling run")
    _add_run_flags(sim, needs_e=True)
    sim.add_argument("--epsilon-stop", dest="epsilon_stop", type=float)
    sim.add_argument("--t-max", dest="t_max", type=float)
    sim.add_argument("--snapshot-stride", dest="snapshot_stride", type=int,
                     help="emit an ensemble snapshot every this many steps")

    res = sub.add_parser("rescaled", help="self-similar-frame run")
    _add_run_flags(res, needs_e=True)
    res.add_argument("--s-max", dest="s_max", type=float)
    res.add_argument("--avg-window", dest="avg_window", type=float)
    res.add_argument("--bins", type=int)
    res.add_argument("--v-max", dest="v_max", type=float)
    res.add_argument("--record-ds", dest="record_ds", type=float)
    res.add_argument("--profile-ds", dest="profile_ds", type=float)

    cpl = sub.add_parser("coupled", help="physical + rescaled with the "
                                         "time-change map between them")
    _add_run_flags(cpl, needs_e=True)
    cpl.add_argument("--epsilon-stop", dest="epsilon_stop", type=float)
    cpl.add_argument("--t-max", dest="t_max", type=float)
    cpl.add_argument("--avg-window", dest="avg_window", type=float)
    cpl.add_argument("--bins", type=int)
    cpl.add_argument("--v-max", dest="v_max", type=float)
    cpl.add_argument("--record-ds", dest="record_ds", type=float)
    cpl.add_argument("--profile-ds", dest="profile_ds", type=float)

    fit = sub.add_parser("fit", help="cooling-law fit on a series CSV")
    fit.add_argument("--input", help="series CSV or a run directory")
    fit.add_argument("--config", help="JSON config or an emitted summary")
    fit.add_argument("--a", type=float, help="dissipation exponent of "
                                             "the run (default from input "
                                             "summary, else 0)")
    fit.add_argument("--transient-fraction", dest="transient_fraction",
                     type=float)
    fit.add_argument("--outdir")

    cnv = sub.add_parser("convergence",
                         help="L1 decay fit against the terminal profile")
    cnv.add_argument("--input", help="run directory with l1.csv and "
                                     "profile.csv, or an l1 CSV")
    cnv.add_argument("--config", help="JSON config or an emitted summary")
    cnv.add_argument("--tau", type=float,
                     help="rescaling rate (default from input summary)")
    cnv.add_argument("--seed", type=int,
                     help="bootstrap seed (default 0)")
    cnv.add_argument("--outdir")
    return ap


def _load_config_file(path) -> dict:
    payload = cio.read_summary_json(path)
    if "config" in payload and isinstance(payload["config"], dict):
        payload = payload["config"]
    unknown = set(payload) - set(_FIELDS)
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    return payload


def parse_config(argv) -> RunConfig:
    """Parse flags (and an optional JSON config) into a validated RunConfig.

    Flags override file values; file values override defaults.  Unknown JSON
    keys and out-of-range values raise UsageError.
    """
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        values = {}
        if getattr(ns, "config", None):
            values.update(_load_config_file(ns.config))
        for name in _FIELDS:
            flag_val = getattr(ns, name, None)
            if flag_val is not None:
                values[name] = flag_val
        mode = SUBCOMMANDS[ns.subcommand]
        if "mode" in values and values["mode"] != mode:
            raise InputError(
                f"config file is for mode {values['mode']!r}, "
                f"subcommand asked for {mode!r}")
        values["mode"] = mode
        if mode in ("physical", "rescaled", "coupled") and "e" not in values:
            raise InputError("missing required parameter e")
        values.setdefault("e", math.nan)   # fit/convergence: unused
        for key in _FLOAT_OPTIONAL:
            if values.get(key) is not None:
                values[key] = float(values[key])
        cfg = RunConfig(**values)
        # Keys stated by the user (flags or file), as opposed to dataclass
        # defaults; fit mode uses this to arbitrate with sidecar summaries.
        cfg._explicit_keys = frozenset(values)
        if cfg.outdir is None:
            cfg.outdir = os.environ.get(OUTDIR_ENV, ".")
        return cfg.validate()
    except InputError as exc:
        raise UsageError(str(exc)) from exc


def _jsonify(obj):
    """Dataclasses / numpy -> plain JSON types; non-finite floats -> None."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _summary(cfg: RunConfig, halt_reason: str, results: dict) -> dict:
    return {
        "config": _jsonify(cfg.to_dict()),
        "config_hash": cfg.hash(),
        "versions": cio.version_stamp(),
        "halt_reason": halt_reason,
        "results": _jsonify(results),
    }


def _run_simulate(cfg: RunConfig, outdir: Path) -> int:
    kcfg = cfg.kernel_config()
    h = cfg.hash()
    hook = None
    if cfg.snapshot_stride > 0:
        def hook(state):
            if state.n_steps % cfg.snapshot_stride == 0:
                name = f"snapshot_{state.n_steps:08d}.csv"
                cio.write_snapshot_csv(outdir / name, state.ens, h)
    series, state, reason = run_physical(
        kcfg, cfg.n, cfg.seed, epsilon_stop=cfg.epsilon_stop,
        t_max=cfg.t_max, c_target=cfg.c_target, init=cfg.init,
        step_hook=hook)
    cio.write_series_csv(outdir / "series.csv", series, h)
    results = {
        "t_end": float(series.t[-1]),
        "E_end": float(series.E[-1]),
        "n_steps": state.n_steps,
        "n_collisions": state.n_collisions,
    }
    cio.write_summary_json(outdir / "summary.json",
                           _summary(cfg, reason, results))
    print(f"simulate: halt={reason} t_end={series.t[-1]:.6g} "
          f"E_end={series.E[-1]:.6g} steps={state.n_steps}")
    return 0


def _rescaled_artifacts(cfg: RunConfig, run, outdir: Path, h: str) -> dict:
    cio.write_series_csv(outdir / "series.csv", run.series, h)
    cio.write_profile_csv(outdir / "profile.csv", run.profile, h)
    s_vals, l1_vals = profile_distance_series(run.snapshots, run.profile)
    cio.write_l1_csv(outdir / "l1.csv", s_vals, l1_vals, h)
    floor = bootstrap_noise_floor(run.profile, seed=cfg.seed,
                                  n_samples=cfg.n)
    return {
        "c0_hat": run.c0_hat,
        "c1_hat": run.c1_hat,
        "stationarity_residual": run.stationarity_residual,
        "stationary_energy_estimate":
            estimate_stationary_energy(cfg.kernel_config()),
        "noise_floor": floor,
        "s_end": float(run.series.t[-1]),
        "E_end": float(run.series.E[-1]),
    }


def _run_rescaled(cfg: RunConfig, outdir: Path) -> int:
    kcfg = cfg.kernel_config()
    h = cfg.hash()
    run = run_rescaled(
        kcfg, cfg.n, cfg.seed, cfg.s_max, avg_window=cfg.avg_window,
        c_target=cfg.c_target, bins=cfg.bins, v_max=cfg.v_max,
        record_ds=cfg.record_ds, profile_ds=cfg.profile_ds, init=cfg.init)
    results = _rescaled_artifacts(cfg, run, outdir, h)
    cio.write_summary_json(outdir / "summary.json",
                           _summary(cfg, "horizon", results))
    print(f"rescaled: s_end={results['s_end']:.6g} "
          f"band=[{run.c0_hat:.6g}, {run.c1_hat:.6g}] "
          f"residual={run.stationarity_residual:.3g}")
    return 0


def _run_coupled(cfg: RunConfig, outdir: Path) -> int:
    kcfg = cfg.kernel_config()
    h = cfg.hash()
    series, state, reason = run_physical(
        kcfg, cfg.n, cfg.seed, epsilon_stop=cfg.epsilon_stop,
        t_max=cfg.t_max, c_target=cfg.c_target, init=cfg.init)
    cio.write_series_csv(outdir / "series.csv", series, h)
    smap = build_scaling_map(series, kcfg.tau, kcfg.a)
    cio.write_map_csv(outdir / "map.csv", smap, h)
    # Partner horizon: a hair past T(t_end) so interpolation never runs off
    # the end of the rescaled record.
    s_max = float(smap.T[-1]) * (1.0 + 1e-9)
    partner = run_rescaled(
        kcfg, cfg.n, cfg.seed + 1, s_max, avg_window=cfg.avg_window,
        c_target=cfg.c_target, bins=cfg.bins, v_max=cfg.v_max,
        record_ds=cfg.record_ds, profile_ds=cfg.profile_ds, init=cfg.init)
    cio.write_series_csv(outdir / "series_rescaled.csv", partner.series, h)
    results = _rescaled_artifacts(cfg, partner, outdir, h)
    results["coupling_max_rel_err"] = verify_energy_coupling(
        series, partner.series, smap)
    results["t_end"] = float(series.t[-1])
    results["T_end"] = float(smap.T[-1])
    cio.write_summary_json(outdir / "summary.json",
                           _summary(cfg, reason, results))
    print(f"coupled: t_end={series.t[-1]:.6g} T_end={smap.T[-1]:.6g} "
          f"coupling_err={results['coupling_max_rel_err']:.3g}")
    return 0


def _resolve_input(cfg: RunConfig, filename: str) -> Path:
    p = Path(cfg.input)
    if p.is_dir():
        p = p / filename
    if not p.exists():
        raise InputError(f"input artifact not found: {p}")
    return p


def _sidecar_summary(path: Path) -> dict:
    summary = path.parent / "summary.json"
    if summary.exists():
        return cio.read_summary_json(summary).get("config", {})
    return {}


def _run_fit(cfg: RunConfig, outdir: Path) -> int:
    src = _resolve_input(cfg, "series.csv")
    series = cio.read_series_csv(src)
    sidecar = _sidecar_summary(src)
    explicit = getattr(cfg, "_explicit_keys", frozenset())
    if "a" in explicit or "a" not in sidecar or sidecar["a"] is None:
        a = cfg.a
    else:
        a = float(sidecar["a"])
    fit = fit_cooling(series, a,
                      transient_fraction=cfg.transient_fraction)
    payload = {"fit": _jsonify(fit), "a": a, "source": str(src),
               "config_hash": cfg.hash()}
    if a == 0.0:
        payload["moment_bound"] = _jsonify(check_moment_bound(
            series, transient_fraction=cfg.transient_fraction))
    cio.write_summary_json(outdir / "fit.json", payload)
    alpha_txt = ("exponential rate"
                 if fit.regime == "critical" else f"exponent={fit.exponent_hat:.4g}")
    print(f"fit: regime={fit.regime} slope={fit.slope:.6g} {alpha_txt} "
          f"r2={fit.r2:.4f} reliable={fit.reliable}")
    if fit.regime == "super-critical" and math.isfinite(fit.tc_hat):
        print(f"fit: blow-up time estimate {fit.tc_hat:.6g} "
              f"(sub-window spread {fit.tc_spread:.2g})")
    return 0


def _run_convergence(cfg: RunConfig, outdir: Path) -> int:
    src = _resolve_input(cfg, "l1.csv")
    s_vals, l1_vals = cio.read_l1_csv(src)
    sidecar = _sidecar_summary(src)
    tau = cfg.tau
    if tau is None:
        if "tau" in sidecar and sidecar["tau"] is not None:
            tau = float(sidecar["tau"])
        elif "e" in sidecar and sidecar["e"] is not None:
            tau = 1.0 - float(sidecar["e"])
        else:
            raise InputError("tau not given and no summary.json beside "
                             "the input to read it from")
    profile_path = src.parent / "profile.csv"
    if profile_path.exists():
        profile = cio.read_profile_csv(profile_path)
        # Per-snapshot count sets the distance noise, not the (summed)
        # count of the time-averaged reference.
        n_snap = int(sidecar["n"]) if sidecar.get("n") else profile.n_samples
        floor = bootstrap_noise_floor(profile, seed=cfg.seed,
                                      n_samples=n_snap)
    else:
        floor = 0.0
    fit = fit_convergence(s_vals, l1_vals, floor, tau)
    payload = {"fit": _jsonify(fit), "tau": tau, "source": str(src),
               "config_hash": cfg.hash()}
    cio.write_summary_json(outdir / "convergence.json", payload)
    print(f"convergence: rate={fit.rate_hat:.6g} r2={fit.r2:.4f} "
          f"points={fit.n_points} reliable={fit.reliable}")
    return 0


_RUNNERS = {
    "physical": _run_simulate,
    "rescaled": _run_rescaled,
    "coupled": _run_coupled,
    "fit": _run_fit,
    "convergence": _run_convergence,
}


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the process exit code."""
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _RUNNERS[cfg.mode](cfg, outdir)
    except CoolgasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
