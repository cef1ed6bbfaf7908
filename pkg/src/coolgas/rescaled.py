"""Rescaled-frame solver: anti-drift plus collisions.

In self-similar variables the velocity distribution g(s, w) obeys

    dg/ds + tau div_w(w g) = Q_e(g, g),

where Q_e is the inelastic collision operator without the energy-dependent
rate factor.  The drift term is solved exactly over a substep: every
velocity is multiplied by exp(tau ds), which multiplies the energy by
exp(2 tau ds).  Collisions then act over the same ds (Lie splitting, drift
first).  Substeps are kept small enough that each half changes the energy
by less than one percent.

With tau near 1 - e the drift input balances collisional dissipation and
the energy settles in a band 0 < c0 <= E(g)(s) <= c1; the time-averaged
speed histogram over the tail window estimates the stationary profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dsmc import REFRESH_INTERVAL, ntc_substep, relative_speed_majorant
from .ensemble import (MomentSeries, ProfileHistogram, VelocityEnsemble,
                       average_histograms, init_ensemble, radial_histogram)
from .errors import DivergenceError, InputError
from .kernel import KernelConfig

__all__ = [
    "RescaledRun",
    "drift_step",
    "run_rescaled",
    "stationarity_residual",
    "l1_distance",
    "estimate_stationary_energy",
    "profile_distance_series",
]

ENERGY_BOUNDS = (1e-4, 1e4)
# Cap on tau * ds so a drift substep moves the energy by less than 1%.
DRIFT_ENERGY_CAP = 0.005
SMOOTH_RECORDS = 10


def drift_step(ens: VelocityEnsemble, tau: float, ds: float) -> VelocityEnsemble:
    """Exact anti-drift flow over ds: velocities scaled by exp(tau ds).

    Returns a new ensemble; moments of order 2l pick up exp(2 l tau ds).
    """
    if not ds > 0:
        raise InputError(f"ds must be > 0, got {ds}")
    if not tau >= 0:
        raise InputError(f"tau must be >= 0, got {tau}")
    return VelocityEnsemble(ens.velocities * math.exp(tau * ds))


def estimate_stationary_energy(config: KernelConfig) -> float:
    """Energy where drift input 2 tau E balances dissipation, assuming a
    Gaussian velocity shape.

    For a Gaussian at energy E the mean cubed relative speed is
    M3(d) (2 E / d)^(3/2) with M3(d) = 2^(3/2) Gamma((d+3)/2) / Gamma(d/2),
    and the dissipation rate is (1-e^2)/4 * J2 * <|u|^3> with J2 the second
    angular moment of the weight.  Used for sizing histograms and divergence
    checks, never asserted.
    """
    if config.tau == 0.0:
        return 1.0
    if config.e == 1.0:
        return math.inf  # no dissipation to balance the drift
    d = config.dim
    m3 = 2.0 ** 1.5 * math.gamma((d + 3) / 2.0) / math.gamma(d / 2.0)
    diss = 0.25 * (1.0 - config.e ** 2) * config.angular_msq * m3 * (2.0 / d) ** 1.5
    root = 2.0 * config.tau / diss
    return root * root


@dataclass
class RescaledRun:
    """Result bundle of a rescaled-frame run."""

    series: MomentSeries
    profile: ProfileHistogram
    c0_hat: float
    c1_hat: float
    stationarity_residual: float
    snapshots: list = field(default_factory=list)  # (s, ProfileHistogram)


def _smoothed_derivative(s: np.ndarray, energy: np.ndarray) -> tuple:
    # Centered finite differences of E over s, then a SMOOTH_RECORDS-wide
    # moving average with shrinking windows at the ends.
    ds = s[2:] - s[:-2]
    fd = (energy[2:] - energy[:-2]) / ds
    s_mid = s[1:-1]
    half = SMOOTH_RECORDS // 2
    kernel = np.ones(SMOOTH_RECORDS)
    sums = np.convolve(fd, kernel, mode="same")
    counts = np.convolve(np.ones_like(fd), kernel, mode="same")
    smoothed = sums / counts
    return s_mid, smoothed, half


def stationarity_residual(series: MomentSeries, window: float) -> float:
    """Max of the smoothed |dE/ds| over the trailing window of the series."""
    s = series.t
    if len(s) < SMOOTH_RECORDS + 2:
        raise InputError("series too short for a stationarity residual")
    if not window > 0:
        raise InputError(f"window must be > 0, got {window}")
    if window > s[-1] - s[0]:
        raise InputError("window exceeds the span of the series")
    s_mid, smoothed, _ = _smoothed_derivative(s, series.E)
    mask = s_mid >= s[-1] - window
    if not mask.any():
        raise InputError("window contains no interior records")
    return float(np.max(np.abs(smoothed[mask])))


def l1_distance(h1: ProfileHistogram, h2: ProfileHistogram) -> float:
    """L1 distance between histograms on identical bins, in [0, 2]."""
    if not np.array_equal(h1.bin_edges, h2.bin_edges):
        raise InputError("histograms have mismatched bin edges")
    return float(np.sum(np.abs(h1.masses - h2.masses))
                 + abs(h1.overflow - h2.overflow))


def profile_distance_series(snapshots, reference: ProfileHistogram):
    """L1 distance of each (s, histogram) snapshot to a reference profile."""
    s_vals = np.array([s for s, _ in snapshots])
    dists = np.array([l1_distance(h, reference) for _, h in snapshots])
    return s_vals, dists


def run_rescaled(config: KernelConfig, n: int, seed, s_max: float, *,
                 avg_window: float = None,
                 c_target: float = 0.05,
                 bins: int = 64,
                 v_max: float = None,
                 record_ds: float = None,
                 profile_ds: float = None,
                 init: str = "maxwellian") -> RescaledRun:
    """Integrate the drift-collision system to s_max.

    avg_window (default s_max / 2) sets the trailing window used for the
    energy band estimates, the time-averaged profile, and the stationarity
    residual.  record_ds and profile_ds (defaults s_max / 100) control the
    spacing of series records and of profile snapshots.  Raises
    DivergenceError when the energy leaves [1e-4, 1e4].
    """
    if not s_max > 0:
        raise InputError(f"s_max must be > 0, got {s_max}")
    if avg_window is None:
        avg_window = 0.5 * s_max
    if not (0 < avg_window <= s_max):
        raise InputError("avg_window must lie in (0, s_max]")
    if record_ds is None:
        record_ds = s_max / 100.0
    if profile_ds is None:
        profile_ds = s_max / 100.0
    if v_max is None:
        target = min(max(estimate_stationary_energy(config), 1.0),
                     ENERGY_BOUNDS[1])
        v_max = 4.0 * math.sqrt(target)
    seq = np.random.SeedSequence(seed)
    init_seed, run_seed = seq.spawn(2)
    ens = init_ensemble(n, config.dim, init, init_seed)
    rng = np.random.default_rng(run_seed)
    vel = ens.velocities
    u_max = relative_speed_majorant(vel)
    tau = config.tau
    series = MomentSeries(config.dim)
    series.record_ensemble(0.0, ens, 0, 0.0)
    snapshots = [(0.0, radial_histogram(ens, bins, v_max))]
    s = 0.0
    n_coll = 0
    n_steps = 0
    next_record = record_ds
    next_snapshot = profile_ds
    ds_cap = DRIFT_ENERGY_CAP / tau if tau > 0 else math.inf
    while s < s_max * (1.0 - 1e-12):
        ds = min(c_target / u_max, ds_cap, s_max - s)
        if tau > 0.0:
            factor = math.exp(tau * ds)
            vel *= factor
            u_max *= factor
        coll, _, u_max = ntc_substep(vel, rng, u_max, ds, 1.0, config)
        s += ds
        n_coll += coll
        n_steps += 1
        if n_steps % REFRESH_INTERVAL == 0:
            u_max = relative_speed_majorant(vel)
        energy = ens.energy()
        if not np.isfinite(energy) or not (
                ENERGY_BOUNDS[0] <= energy <= ENERGY_BOUNDS[1]):
            raise DivergenceError(
                f"rescaled energy {energy:.6g} left {ENERGY_BOUNDS} at s={s:.6g}",
                energy=energy, s=s)
        at_end = s >= s_max * (1.0 - 1e-12)
        if s >= next_record * (1.0 - 1e-12) or at_end:
            series.record_ensemble(s, ens, n_coll, ds)
            next_record += record_ds
        if s >= next_snapshot * (1.0 - 1e-12) or at_end:
            snapshots.append((s, radial_histogram(ens, bins, v_max)))
            next_snapshot += profile_ds
    window_lo = s_max - avg_window
    tail = [h for sk, h in snapshots if sk >= window_lo * (1.0 - 1e-12)]
    profile = average_histograms(tail)
    t_arr = series.t
    e_arr = series.E
    in_window = t_arr >= window_lo * (1.0 - 1e-12)
    c0_hat = float(e_arr[in_window].min())
    c1_hat = float(e_arr[in_window].max())
    residual = stationarity_residual(series, avg_window)
    return RescaledRun(series=series, profile=profile, c0_hat=c0_hat,
                       c1_hat=c1_hat, stationarity_residual=residual,
                       snapshots=snapshots)
