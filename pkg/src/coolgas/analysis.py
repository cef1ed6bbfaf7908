"""Cooling-law fits, moment-bound checks, and convergence-rate estimates.

The cooling trichotomy is read off through the linearizing transform

    y(t) = E(t)^(a - 1/2)   for a != 1/2,
    y(t) = log E(t)         for a = 1/2.

Between dissipation brackets the transformed energy is a straight line:
increasing for a < 1/2 (power-law cooling, exponent 2 alpha with
alpha = 1/(2a - 1) < 0), decreasing for a = 1/2 (exponential cooling), and
decreasing through zero for a > 1/2, whose root estimates the blow-up time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import MomentSeries, ProfileHistogram
from .errors import InputError

__all__ = [
    "CoolingFit",
    "MomentBoundCheck",
    "ConvergenceFit",
    "DecayCheck",
    "linearize_energy",
    "fit_cooling",
    "check_moment_bound",
    "derivative_decay",
    "fit_convergence",
    "regime_for",
    "bootstrap_noise_floor",
]

RELIABLE_R2 = 0.9
MIN_FIT_POINTS = 5


def regime_for(a: float) -> str:
    if a < 0.5:
        return "sub-critical"
    if a == 0.5:
        return "critical"
    return "super-critical"


def _linfit(x: np.ndarray, y: np.ndarray):
    # Least-squares line with r^2; plain normal equations are fine at the
    # series lengths used here.
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    sxx = float(np.dot(dx, dx))
    if sxx == 0.0:
        raise InputError("degenerate abscissa in linear fit")
    slope = float(np.dot(dx, dy)) / sxx
    intercept = ym - slope * xm
    resid = dy - slope * dx
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(dy, dy))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def linearize_energy(series: MomentSeries, a: float):
    """Transform E(t) to the variable that cools linearly for exponent a."""
    energy = series.E
    if np.any(energy <= 0):
        raise InputError("linearization needs strictly positive energies")
    if a == 0.5:
        return series.t, np.log(energy)
    return series.t, energy ** (a - 0.5)


@dataclass(frozen=True)
class CoolingFit:
    a: float
    alpha: float            # 1/(2a - 1); nan at the critical exponent
    regime: str
    slope: float            # main-window slope of the linearized energy
    slope_lo: float         # min over sliding sub-windows
    slope_hi: float         # max over sliding sub-windows
    intercept: float
    r2: float
    fit_window: tuple       # (t_lo, t_hi)
    reliable: bool          # False when r2 < 0.9 or the fit degenerates
    exponent_hat: float     # fitted power of E(t); nan in the critical regime
    tc_hat: float           # fitted blow-up time; nan unless a > 1/2
    tc_spread: float        # sub-window spread of the root estimate


def _transient_start(t: np.ndarray, y: np.ndarray, fraction: float) -> int:
    # Start of the fit window: the later of the requested fraction and the
    # point where sliding-window slopes settle within 10% of the late-run
    # median slope.
    k_frac = int(math.ceil(fraction * len(t)))
    k_frac = min(k_frac, len(t) - MIN_FIT_POINTS)
    k_frac = max(k_frac, 0)
    n_sub = 8
    span = len(t) - k_frac
    width = span // n_sub
    if width < MIN_FIT_POINTS:
        return k_frac
    slopes = []
    starts = []
    for w in range(n_sub):
        lo = k_frac + w * width
        hi = lo + width
        s, _, _ = _linfit(t[lo:hi], y[lo:hi])
        slopes.append(s)
        starts.append(lo)
    ref = float(np.median(slopes[n_sub // 2:]))
    if ref == 0.0:
        return k_frac
    for s, lo in zip(slopes, starts):
        if abs(s / ref - 1.0) <= 0.1:
            return max(k_frac, lo)
    return k_frac


def fit_cooling(series: MomentSeries, a: float,
                transient_fraction: float = 0.2) -> CoolingFit:
    """Fit the linearized cooling law over the post-transient window.

    Returns slope brackets from sliding sub-windows, the fitted decay
    exponent of E for the power-law regimes, and the extrapolated blow-up
    time for a > 1/2.  A poor fit (r^2 < 0.9) is reported through the
    reliable flag, never raised.
    """
    if not (0.0 <= transient_fraction < 1.0):
        raise InputError("transient_fraction must lie in [0, 1)")
    t_all, y_all = linearize_energy(series, a)
    if len(t_all) < 3 * MIN_FIT_POINTS:
        raise InputError("series too short to fit a cooling law")
    k0 = _transient_start(t_all, y_all, transient_fraction)
    t = t_all[k0:]
    y = y_all[k0:]
    slope, intercept, r2 = _linfit(t, y)
    # Sliding sub-windows of a third of the span, six placements.
    n_sub = 6
    width = max(len(t) // 3, MIN_FIT_POINTS)
    offsets = np.linspace(0, len(t) - width, n_sub).astype(int)
    sub_slopes = []
    sub_roots = []
    for lo in offsets:
        s_w, i_w, _ = _linfit(t[lo:lo + width], y[lo:lo + width])
        sub_slopes.append(s_w)
        if s_w != 0.0:
            sub_roots.append(-i_w / s_w)
    slope_lo = float(np.min(sub_slopes))
    slope_hi = float(np.max(sub_slopes))
    reliable = bool(r2 >= RELIABLE_R2)
    alpha = math.nan if a == 0.5 else 1.0 / (2.0 * a - 1.0)
    regime = regime_for(a)
    exponent_hat = math.nan
    tc_hat = math.nan
    tc_spread = math.nan
    energy = series.E[k0:]
    if regime == "sub-critical":
        # y = slope*(t + intercept/slope), so E is a pure power of the
        # shifted time; regress log E on the shifted log-time.
        if slope > 0.0 and intercept > 0.0:
            shift = intercept / slope
            exponent_hat, _, _ = _linfit(np.log(t + shift), np.log(energy))
        else:
            reliable = False
    elif regime == "super-critical":
        if slope < 0.0 and intercept > 0.0:
            tc_hat = -intercept / slope
            roots = [r for r in sub_roots if r > t[0]]
            if roots:
                tc_spread = float(np.max(roots) - np.min(roots))
            mask = t < tc_hat
            if mask.sum() >= MIN_FIT_POINTS:
                exponent_hat, _, _ = _linfit(
                    np.log(tc_hat - t[mask]), np.log(energy[mask]))
        else:
            reliable = False
    return CoolingFit(
        a=a, alpha=alpha, regime=regime, slope=slope, slope_lo=slope_lo,
        slope_hi=slope_hi, intercept=intercept, r2=r2,
        fit_window=(float(t[0]), float(t[-1])), reliable=reliable,
        exponent_hat=exponent_hat, tc_hat=tc_hat, tc_spread=tc_spread,
    )


@dataclass(frozen=True)
class MomentBoundCheck:
    kappa_hat: float        # sup of m_3/2(t) (1 + mu0_hat t)^3
    mu0_hat: float          # cooling rate fitted from the energy record
    max_violation: float    # kept at 0: kappa_hat is defined as the sup


def check_moment_bound(series: MomentSeries,
                       transient_fraction: float = 0.2) -> MomentBoundCheck:
    """Estimate the constant in m_3/2(t) <= kappa / (1 + mu0 t)^3.

    mu0 is read from the power-law cooling fit at a = 0 (the transform
    E^(-1/2) is the line (1 + mu0 t)/sqrt(E0)), and kappa_hat is the sup of
    the compensated moment.  Stability of kappa_hat under horizon growth is
    the bound check; comparing calls on truncated series performs it.
    """
    m32 = series.m_three_half
    if np.any(m32 <= 0):
        raise InputError("moment bound check needs positive m_3/2 records")
    fit = fit_cooling(series, a=0.0, transient_fraction=transient_fraction)
    if fit.slope <= 0.0 or fit.intercept <= 0.0:
        raise InputError("energy record is not power-law cooling")
    mu0_hat = fit.slope / fit.intercept
    kappa_hat = float(np.max(m32 * (1.0 + mu0_hat * series.t) ** 3))
    return MomentBoundCheck(kappa_hat=kappa_hat, mu0_hat=mu0_hat,
                            max_violation=0.0)


@dataclass(frozen=True)
class DecayCheck:
    s_points: np.ndarray
    values: np.ndarray      # smoothed |dE/ds| at the sample points
    noise_floor: float
    decreasing: bool        # each value <= previous + noise floor


def derivative_decay(series: MomentSeries, n_points: int = 5,
                     s_points=None, noise_floor: float = None,
                     transient_fraction: float = 0.2) -> DecayCheck:
    """Sample the smoothed |dE/ds| at geometrically spaced horizons.

    The default grid spans [transient_fraction * s_end, s_end]: the initial
    layer is excluded on the same 20% rule as the cooling fits, because
    |dE/ds| legitimately rises through the relaxation inflection before the
    asymptotic decay sets in.  The noise floor defaults to a robust spread
    (scaled MAD) of the smoothed derivative over the final quarter.
    """
    from .rescaled import _smoothed_derivative
    s = series.t
    if len(s) < 3 * MIN_FIT_POINTS:
        raise InputError("series too short for a derivative decay check")
    s_mid, smoothed, _ = _smoothed_derivative(s, series.E)
    if s_points is None:
        lo = max(s_mid[0], transient_fraction * s_mid[-1])
        s_points = np.geomspace(lo, s_mid[-1], n_points)
    s_points = np.asarray(s_points, dtype=float)
    if s_points.size < 3:
        raise InputError("need at least three sample points")
    if np.any(s_points < s_mid[0]) or np.any(s_points > s_mid[-1]):
        raise InputError("sample points outside the differentiable range")
    idx = np.searchsorted(s_mid, s_points)
    idx = np.clip(idx, 0, len(s_mid) - 1)
    values = np.abs(smoothed[idx])
    if noise_floor is None:
        tail = smoothed[s_mid >= s_mid[-1] - 0.25 * (s_mid[-1] - s_mid[0])]
        noise_floor = 1.4826 * float(np.median(np.abs(tail - np.median(tail))))
    decreasing = bool(np.all(np.diff(values) <= noise_floor))
    return DecayCheck(s_points=s_points, values=values,
                      noise_floor=float(noise_floor), decreasing=decreasing)


@dataclass(frozen=True)
class ConvergenceFit:
    rate_hat: float
    noise_floor: float
    mu_e_check: float       # rate_hat / tau, the reduced rate
    r2: float
    n_points: int           # points above 3x the noise floor
    reliable: bool


def fit_convergence(s, l1, noise_floor: float, tau: float) -> ConvergenceFit:
    """Exponential fit of an L1 distance decay above 3x the noise floor.

    Fewer than 5 usable points flags the fit unreliable instead of raising.
    """
    s = np.asarray(s, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    if s.shape != l1.shape:
        raise InputError("s and l1 must have matching shapes")
    if not noise_floor >= 0:
        raise InputError("noise_floor must be >= 0")
    mask = l1 > 3.0 * noise_floor
    n_points = int(mask.sum())
    if n_points < MIN_FIT_POINTS:
        return ConvergenceFit(rate_hat=math.nan, noise_floor=noise_floor,
                              mu_e_check=math.nan, r2=math.nan,
                              n_points=n_points, reliable=False)
    slope, _, r2 = _linfit(s[mask], np.log(l1[mask]))
    rate = -slope
    mu_e = rate / tau if tau > 0 else math.nan
    return ConvergenceFit(rate_hat=rate, noise_floor=noise_floor,
                          mu_e_check=mu_e, r2=r2, n_points=n_points,
                          reliable=bool(r2 >= RELIABLE_R2 and rate > 0))


def bootstrap_noise_floor(hist: ProfileHistogram, resamples: int = 200,
                          seed=0, n_samples: int = None) -> float:
    """Median L1 distance of multinomial resamples of a histogram to itself.

    Estimates the finite-sample noise level of distances computed against
    the histogram.  n_samples sets the resample size; it defaults to the
    histogram's own count, but when the histogram is a time average the
    caller should pass the per-snapshot count, since that is what limits
    the distance measurement.
    """
    if resamples < 2:
        raise InputError("need at least 2 resamples")
    rng = np.random.default_rng(seed)
    probs = np.append(hist.masses, hist.overflow)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    n = hist.n_samples if n_samples is None else int(n_samples)
    if n < 1:
        raise InputError("n_samples must be >= 1")
    counts = rng.multinomial(n, probs, size=resamples)
    dists = np.sum(np.abs(counts / n - probs), axis=1)
    return float(np.median(dists))
