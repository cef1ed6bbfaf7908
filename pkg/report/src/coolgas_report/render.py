"""Figure rendering for run artifacts.

Every renderer reads artifact files, writes one PNG, and returns a caption
string for the summary page.  Output must be reproducible: a fixed style
sheet, the Agg backend, and a constant PNG metadata block, so rendering the
same artifacts twice yields byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from scipy.special import gammainc, gammaln

from .artifacts import (read_convergence_fit, read_cooling_fit, read_json,
                        read_l1, read_profile, read_series)
from .errors import InputError

__all__ = [
    "ReportSpec", "PLOTS",
    "render_cooling", "render_profile", "render_convergence",
    "generate_report", "write_summary_page",
]

PLOTS = ("cooling", "profile", "convergence")

# Artifact files each plot consumes, relative to the input directory.
PLOT_INPUTS = {
    "cooling": ("series.csv", "fit.json"),
    "profile": ("profile.csv",),
    "convergence": ("l1.csv", "convergence.json"),
}

# One fixed style for every figure; nothing here may depend on the clock,
# the environment, or previously rendered figures.
_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "figure.constrained_layout.use": True,
    "font.size": 10,
    "axes.titlesize": 11,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 9,
    "lines.markersize": 3.5,
}

_DATA_COLOR = "#1f77b4"
_FIT_COLOR = "#d62728"
_OVERLAY_COLOR = "#2ca02c"
_BANNER = dict(ha="center", va="top", fontsize=9, color="#7f3f00",
               bbox=dict(boxstyle="round", facecolor="#ffe0a3",
                         edgecolor="#b07000"))


def _save(fig, out_path) -> None:
    # A constant Software chunk replaces the version-stamped default.
    fig.savefig(out_path, format="png",
                metadata={"Software": "coolgas-report"})
    plt.close(fig)


def _banner(fig, text: str) -> None:
    fig.text(0.5, 0.995, text, **_BANNER)


def _finite_window(fit, t) -> tuple:
    lo, hi = fit.fit_window
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        return float(t[0]), float(t[-1])
    return lo, hi


def render_cooling(series_path, fit_path, out_path) -> str:
    """Energy decay with the fitted law, on axes chosen by the regime.

    Sub-critical cooling is a power law, shown log-log; critical cooling is
    exponential, shown semi-log; super-critical cooling reaches zero in
    finite time, shown as the linearizing power E^(a-1/2) against t.
    """
    series = read_series(series_path)
    fit = read_cooling_fit(fit_path)
    t, e = series.t, series.E
    lo, hi = _finite_window(fit, t)

    with matplotlib.rc_context(_STYLE):
        fig, ax = plt.subplots()
        if fit.regime == "sub-critical":
            mask = (t > 0) & (e > 0)
            if np.count_nonzero(mask) < 2:
                raise InputError(
                    "series has no positive-time samples to plot")
            ax.loglog(t[mask], e[mask], ".", color=_DATA_COLOR,
                      label="E(t)")
            t_lo = max(lo, float(np.min(t[mask])))
            if math.isfinite(fit.slope) and math.isfinite(fit.intercept):
                tw = np.geomspace(max(t_lo, 1e-300), max(hi, 2 * t_lo), 256)
                yw = fit.intercept + fit.slope * tw
                ok = yw > 0
                if np.any(ok):
                    ax.loglog(tw[ok], yw[ok] ** (2.0 * fit.alpha),
                              color=_FIT_COLOR, lw=1.3,
                              label=f"fit: exponent {fit.exponent_hat:.3f}")
            ax.set_ylabel("E(t)")
            note = (f"regime: sub-critical (a={fit.a:g})\n"
                    f"exponent {fit.exponent_hat:.3f}, $r^2$={fit.r2:.4f}")
            caption = (f"Energy decay on log-log axes: power-law cooling "
                       f"with fitted exponent {fit.exponent_hat:.3f} "
                       f"(r^2={fit.r2:.4f}) over t in [{lo:.3g}, {hi:.3g}]; "
                       f"sub-critical regime, a={fit.a:g}.")
        elif fit.regime == "critical":
            mask = e > 0
            if np.count_nonzero(mask) < 2:
                raise InputError("series has no positive energies to plot")
            ax.semilogy(t[mask], e[mask], ".", color=_DATA_COLOR,
                        label="E(t)")
            rate = -fit.slope
            if math.isfinite(fit.slope) and math.isfinite(fit.intercept):
                tw = np.linspace(lo, hi, 256)
                ax.semilogy(tw, np.exp(fit.intercept + fit.slope * tw),
                            color=_FIT_COLOR, lw=1.3,
                            label=f"fit: rate {rate:.4g}")
            ax.set_ylabel("E(t)")
            note = (f"regime: critical (a={fit.a:g})\n"
                    f"decay rate {rate:.4g}, $r^2$={fit.r2:.4f}")
            caption = (f"Energy decay on semi-log axes: exponential cooling "
                       f"at fitted rate {rate:.4g} (r^2={fit.r2:.4f}) over "
                       f"t in [{lo:.3g}, {hi:.3g}]; critical regime, "
                       f"a={fit.a:g}.")
        else:
            p = fit.a - 0.5
            mask = e > 0
            if np.count_nonzero(mask) < 2:
                raise InputError("series has no positive energies to plot")
            ax.plot(t[mask], e[mask] ** p, ".", color=_DATA_COLOR,
                    label=f"$E(t)^{{{p:g}}}$")
            if math.isfinite(fit.slope) and math.isfinite(fit.intercept):
                tw = np.linspace(lo, hi, 256)
                yw = fit.intercept + fit.slope * tw
                ax.plot(tw, np.maximum(yw, 0.0), color=_FIT_COLOR, lw=1.3,
                        label="linear fit")
            if math.isfinite(fit.tc_hat):
                ax.axvline(fit.tc_hat, color="0.3", ls="--", lw=1.0,
                           label=f"$T_c$ = {fit.tc_hat:.4g}")
            ax.set_ylabel(f"$E(t)^{{{p:g}}}$")
            ax.set_ylim(bottom=0.0)
            note = (f"regime: super-critical (a={fit.a:g})\n"
                    f"cutoff $T_c$ = {fit.tc_hat:.4g}, $r^2$={fit.r2:.4f}")
            caption = (f"Linearized energy E^{p:g} on linear axes: cooling "
                       f"reaches zero at extrapolated time Tc = "
                       f"{fit.tc_hat:.4g} (r^2={fit.r2:.4f}); "
                       f"super-critical regime, a={fit.a:g}.")
        ax.set_xlabel("t")
        ax.set_title("Kinetic energy decay")
        ax.text(0.03, 0.04, note, transform=ax.transAxes, va="bottom",
                fontsize=9,
                bbox=dict(boxstyle="round", facecolor="white", alpha=0.8,
                          edgecolor="0.7"))
        ax.legend(loc="upper right")
        if not fit.reliable:
            _banner(fig, "fit flagged unreliable; parameters are indicative "
                         "only")
            caption += " Fit flagged unreliable."
        _save(fig, out_path)
    return caption


def _maxwell_speed_cdf(v, dim: int, energy: float):
    # Speed CDF of an isotropic Gaussian with mean square speed `energy`:
    # the regularized lower incomplete gamma P(d/2, v^2 d / (2 E)).
    v = np.asarray(v, dtype=float)
    return gammainc(0.5 * dim, 0.5 * dim * v * v / energy)


def _maxwell_speed_pdf(v, dim: int, energy: float):
    v = np.asarray(v, dtype=float)
    sig2 = energy / dim
    log_norm = (math.log(2.0) * (1.0 - 0.5 * dim)
                - gammaln(0.5 * dim) - 0.5 * dim * math.log(sig2))
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = np.exp(log_norm + (dim - 1) * np.log(v[pos])
                      - 0.5 * v[pos] * v[pos] / sig2)
    return out


def render_profile(profile_path, out_path, overlay: bool = True,
                   dim: int = 3, energy: float | None = None) -> str:
    """Speed histogram as a density bar plot, optionally with the
    Maxwellian of matching energy overlaid; the L1 distance between the
    two goes into the caption.

    `energy` pins the overlay's mean square speed; left as None it is
    estimated from the histogram itself via bin midpoints.
    """
    prof = read_profile(profile_path)
    if overlay and not dim >= 1:
        raise InputError("overlay dimension must be >= 1")
    mids = 0.5 * (prof.edges[:-1] + prof.edges[1:])
    caption = (f"Speed distribution over {len(prof.masses)} bins "
               f"(total mass {prof.total_mass:.4f}")
    caption += (f", {prof.n_samples} samples)."
                if prof.n_samples else ").")

    with matplotlib.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.bar(prof.edges[:-1], prof.density, width=prof.widths,
               align="edge", color=_DATA_COLOR, alpha=0.55,
               edgecolor=_DATA_COLOR, linewidth=0.5, label="profile")
        if overlay:
            mass_in = float(np.sum(prof.masses))
            if energy is None:
                if mass_in <= 0:
                    raise InputError(
                        "profile carries no mass; cannot match an overlay")
                energy = float(np.sum(prof.masses * mids * mids) / mass_in)
            if not energy > 0:
                raise InputError("overlay energy must be positive")
            cdf = _maxwell_speed_cdf(prof.edges, dim, energy)
            model = np.diff(cdf)
            l1 = float(np.sum(np.abs(prof.masses - model))
                       + abs(prof.overflow - (1.0 - cdf[-1])))
            vv = np.linspace(0.0, float(prof.edges[-1]), 512)
            ax.plot(vv, _maxwell_speed_pdf(vv, dim, energy),
                    color=_OVERLAY_COLOR, lw=1.4,
                    label=f"Maxwellian, $L^1$ = {l1:.4f}")
            caption += (f" Maxwellian overlay at matching energy "
                        f"{energy:.4g} (d={dim}); L1 distance {l1:.4f}.")
        ax.set_xlabel("speed")
        ax.set_ylabel("probability density")
        ax.set_title("Speed distribution")
        ax.legend(loc="upper right")
        _save(fig, out_path)
    return caption


def render_convergence(l1_path, fit_path, out_path) -> str:
    """L1 distance decay on semi-log axes with the fitted rate and the
    bootstrap noise floor; flags runs where no decay is resolvable."""
    s, l1 = read_l1(l1_path)
    fit = read_convergence_fit(fit_path)
    pos = l1 > 0
    if np.count_nonzero(pos) < 2:
        raise InputError("l1 series has no positive values to plot")

    no_decay = not math.isfinite(fit.rate_hat) or fit.n_points < 5
    with matplotlib.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(s[pos], l1[pos], ".", color=_DATA_COLOR,
                    label="$L^1$ distance")
        floor = fit.noise_floor
        if math.isfinite(floor) and floor > 0:
            ax.axhline(floor, color="0.35", ls=":", lw=1.2,
                       label=f"noise floor {floor:.3g}")
            ax.axhline(3.0 * floor, color="0.6", ls=":", lw=0.8,
                       label="fit threshold (3x floor)")
        if math.isfinite(fit.rate_hat):
            mask = pos & (l1 > 3.0 * floor) if (
                math.isfinite(floor) and floor > 0) else pos
            if np.count_nonzero(mask) >= 2:
                # The artifact stores only the rate, so anchor the line's
                # level by least squares on the points the fit used.
                c = float(np.mean(np.log(l1[mask]) + fit.rate_hat * s[mask]))
                sw = np.linspace(float(np.min(s[mask])),
                                 float(np.max(s[mask])), 128)
                ax.semilogy(sw, np.exp(c - fit.rate_hat * sw),
                            color=_FIT_COLOR, lw=1.3,
                            label=f"fit: rate {fit.rate_hat:.4g}")
        if no_decay:
            ax.text(0.5, 0.5, "no resolvable decay", transform=ax.transAxes,
                    ha="center", va="center", fontsize=13, color="0.25",
                    bbox=dict(boxstyle="round", facecolor="#f0f0f0",
                              edgecolor="0.5"))
        ax.set_xlabel("s")
        ax.set_ylabel("$L^1$ distance")
        ax.set_title("Distance to the terminal profile")
        ax.legend(loc="upper right")
        if not fit.reliable:
            _banner(fig, "fit flagged unreliable; parameters are indicative "
                         "only")
        _save(fig, out_path)

    if no_decay:
        caption = (f"L1 distance on semi-log axes: no resolvable decay "
                   f"above the noise floor {fit.noise_floor:.3g} "
                   f"({fit.n_points} usable points).")
    else:
        caption = (f"L1 distance on semi-log axes: fitted decay rate "
                   f"{fit.rate_hat:.4g} (r^2={fit.r2:.4f}, {fit.n_points} "
                   f"points above 3x noise floor {fit.noise_floor:.3g}).")
    if not fit.reliable:
        caption += " Fit flagged unreliable."
    return caption


@dataclass(frozen=True)
class ReportSpec:
    """What to render: which plots, from which run directory, to where.

    `dim` sets the overlay dimension for the profile plot; None means take
    d from summary.json when present, else 3.
    """
    input_dir: Path
    plots: tuple
    out_dir: Path
    overlay: bool = True
    dim: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "input_dir", Path(self.input_dir))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "plots", tuple(self.plots))


def _resolve_dim(spec: ReportSpec) -> int:
    if spec.dim is not None:
        return spec.dim
    summary = spec.input_dir / "summary.json"
    if summary.exists():
        payload = read_json(summary)
        cfg = payload.get("config", {})
        if isinstance(cfg, dict) and isinstance(cfg.get("d"), int):
            return cfg["d"]
    return 3


def generate_report(spec: ReportSpec) -> dict:
    """Render the selected plots and write the summary page.

    Returns {"entries": [(plot, image path, caption), ...],
    "page": path of report.html}.  Raises InputError when a selected
    plot's artifacts are missing or malformed.
    """
    unknown = [p for p in spec.plots if p not in PLOTS]
    if unknown:
        raise InputError(f"unknown plot selection: {', '.join(unknown)}")
    if not spec.plots:
        raise InputError("empty plot selection")
    for plot in spec.plots:
        for name in PLOT_INPUTS[plot]:
            p = spec.input_dir / name
            if not p.exists():
                raise InputError(f"missing artifact for {plot} plot: {p}")

    spec.out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for plot in PLOTS:             # canonical order, whatever was given
        if plot not in spec.plots:
            continue
        out = spec.out_dir / f"{plot}.png"
        if plot == "cooling":
            caption = render_cooling(spec.input_dir / "series.csv",
                                     spec.input_dir / "fit.json", out)
        elif plot == "profile":
            caption = render_profile(spec.input_dir / "profile.csv", out,
                                     overlay=spec.overlay,
                                     dim=_resolve_dim(spec))
        else:
            caption = render_convergence(spec.input_dir / "l1.csv",
                                         spec.input_dir / "convergence.json",
                                         out)
        entries.append((plot, out, caption))
    page = spec.out_dir / "report.html"
    write_summary_page(page, entries, source=spec.input_dir)
    return {"entries": entries, "page": page}


_PAGE_HEAD = """\
<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>coolgas run report</title>
<style>
body { font-family: sans-serif; max-width: 46em; margin: 2em auto;
       color: #222; }
figure { margin: 2em 0; }
img { max-width: 100%; border: 1px solid #ccc; }
figcaption { font-size: 0.9em; color: #444; margin-top: 0.5em; }
footer { margin-top: 3em; font-size: 0.8em; color: #888; }
</style>
</head>
<body>
"""


def write_summary_page(path, entries, source=None) -> None:
    """Single HTML page linking every rendered figure with its caption.

    Content is a pure function of the entries (no timestamps), so reruns
    write identical bytes.
    """
    lines = [_PAGE_HEAD, "<h1>coolgas run report</h1>\n"]
    if source is not None:
        lines.append(f"<p>artifacts: <code>{source}</code></p>\n")
    for plot, image, caption in entries:
        lines.append("<figure>\n")
        lines.append(f'<img src="{Path(image).name}" alt="{plot} plot">\n')
        lines.append(f"<figcaption>{caption}</figcaption>\n")
        lines.append("</figure>\n")
    lines.append("<footer>coolgas-report</footer>\n</body>\n</html>\n")
    Path(path).write_text("".join(lines))
