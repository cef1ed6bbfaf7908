"""Cooling-law fits and convergence diagnostics on synthetic records."""

import math

import numpy as np
import pytest

from coolgas import (
    MomentSeries, bootstrap_noise_floor, check_moment_bound,
    derivative_decay, fit_convergence, fit_cooling, init_ensemble,
    linearize_energy, radial_histogram, regime_for,
)
from coolgas.errors import InputError


def series_from(t, energy, m32=None):
    series = MomentSeries(3)
    if m32 is None:
        m32 = np.asarray(energy, dtype=float) ** 0.75
    for ti, ei, mi in zip(t, energy, m32):
        series.append(ti, ei, ei ** 0.25, mi, np.zeros(3), 0, 0.01)
    return series


def power_law_series(a, c, t_end=20.0, n=300):
    # E = (1 + c t)^(2 alpha) with alpha = 1/(2a-1) < 0; its linearized
    # form y = E^(a-1/2) is exactly 1 + c t
    t = np.linspace(0.0, t_end, n)
    alpha = 1.0 / (2.0 * a - 1.0)
    return t, (1.0 + c * t) ** (2.0 * alpha)


# --------------------------------------------------------------- regimes

def test_regime_classification_is_exact_at_the_critical_point():
    assert regime_for(0.0) == "sub-critical"
    assert regime_for(0.49999) == "sub-critical"
    assert regime_for(0.5) == "critical"
    assert regime_for(0.5 + 1e-12) == "super-critical"
    assert regime_for(1.0) == "super-critical"


def test_linearize_energy_applies_the_regime_transform():
    t = np.linspace(0.0, 5.0, 20)
    e = np.exp(-0.3 * t)
    series = series_from(t, e)
    _, y0 = linearize_energy(series, 0.0)
    np.testing.assert_allclose(y0, e ** -0.5, rtol=1e-15)
    _, yc = linearize_energy(series, 0.5)
    np.testing.assert_allclose(yc, np.log(e), rtol=1e-15)
    _, y1 = linearize_energy(series, 1.0)
    np.testing.assert_allclose(y1, e ** 0.5, rtol=1e-15)


def test_linearize_energy_rejects_nonpositive_records():
    bad = series_from([0.0, 1.0], [1.0, 1.0])
    bad._E[1] = 0.0
    with pytest.raises(InputError):
        linearize_energy(bad, 0.0)


# ----------------------------------------------------------- fit_cooling

def test_fit_recovers_a_subcritical_power_law():
    t, e = power_law_series(a=0.2, c=0.3)
    fit = fit_cooling(series_from(t, e), a=0.2)
    assert fit.regime == "sub-critical"
    assert fit.reliable
    assert fit.slope == pytest.approx(0.3, rel=1e-6)
    assert fit.r2 > 0.999999
    # E decays like t^(2 alpha) with alpha = 1/(2a-1) = -5/3
    assert fit.alpha == pytest.approx(-5.0 / 3.0, rel=1e-12)
    assert fit.exponent_hat == pytest.approx(-10.0 / 3.0, abs=1e-3)
    assert math.isnan(fit.tc_hat)


def test_fit_recovers_haff_cooling():
    t, e = power_law_series(a=0.0, c=0.0273)
    fit = fit_cooling(series_from(t, e), a=0.0)
    assert fit.exponent_hat == pytest.approx(-2.0, abs=1e-3)
    assert fit.slope_lo - 1e-12 <= fit.slope <= fit.slope_hi + 1e-12
    assert fit.slope_hi - fit.slope_lo < 1e-6   # noiseless line


def test_fit_recovers_critical_exponential():
    t = np.linspace(0.0, 80.0, 400)
    rate = 0.055
    fit = fit_cooling(series_from(t, np.exp(-rate * t)), a=0.5)
    assert fit.regime == "critical"
    assert fit.reliable
    assert fit.slope == pytest.approx(-rate, rel=1e-9)
    assert math.isnan(fit.alpha)
    assert math.isnan(fit.exponent_hat)


def test_fit_recovers_supercritical_blowup_time():
    # E = (Tc - t)^2 linearizes at a = 1 to y = Tc - t
    tc = 5.0
    t = np.linspace(0.0, 4.5, 200)
    fit = fit_cooling(series_from(t, (tc - t) ** 2), a=1.0)
    assert fit.regime == "super-critical"
    assert fit.reliable
    assert fit.tc_hat == pytest.approx(tc, abs=1e-3)
    assert fit.tc_spread < 1e-6
    assert fit.exponent_hat == pytest.approx(2.0, abs=1e-3)
    assert fit.slope < 0


def test_fit_slope_brackets_cover_noisy_scatter():
    rng = np.random.default_rng(0)
    t = np.linspace(0.0, 20.0, 300)
    y = 1.0 + 0.3 * t + rng.normal(0.0, 0.05, t.size)
    e = np.maximum(y, 0.1) ** -2.0   # invert the a=0 transform
    fit = fit_cooling(series_from(t, e), a=0.0)
    assert fit.slope_lo < fit.slope < fit.slope_hi
    assert fit.slope_lo < 0.3 < fit.slope_hi
    assert fit.reliable


def test_fit_excludes_an_initial_transient():
    # flat shelf for t < 4, then the power law; the window start moves past
    # the shelf and the slope comes out clean
    t = np.linspace(0.0, 20.0, 400)
    y = np.where(t < 4.0, 1.0, 1.0 + 0.3 * (t - 4.0))
    fit = fit_cooling(series_from(t, y ** -2.0), a=0.0)
    assert fit.fit_window[0] >= 4.0
    assert fit.slope == pytest.approx(0.3, rel=1e-6)


def test_fit_flags_heating_data_as_unreliable():
    t = np.linspace(0.0, 10.0, 100)
    e = np.exp(0.2 * t)   # heating: no sub-critical cooling law applies
    fit = fit_cooling(series_from(t, e), a=0.0)
    assert not fit.reliable
    assert math.isnan(fit.exponent_hat)


def test_fit_flags_noise_as_unreliable():
    rng = np.random.default_rng(3)
    t = np.linspace(0.0, 10.0, 120)
    e = np.exp(rng.normal(0.0, 1.0, t.size))
    fit = fit_cooling(series_from(t, e), a=0.5)
    assert not fit.reliable
    assert fit.r2 < 0.9


def test_fit_requires_a_minimum_record_count():
    t = np.linspace(0.0, 1.0, 10)
    with pytest.raises(InputError):
        fit_cooling(series_from(t, np.exp(-t)), a=0.5)
    with pytest.raises(InputError):
        fit_cooling(series_from(np.linspace(0, 1, 30), np.exp(-t[0]) *
                                np.ones(30)), a=0.0,
                    transient_fraction=1.0)


# ------------------------------------------------------ moment bound

def test_moment_bound_constant_for_matched_decay():
    # m_3/2 = (1 + c t)^-3 compensates exactly: kappa = 1
    c = 0.0273
    t = np.linspace(0.0, 200.0, 500)
    e = (1.0 + c * t) ** -2.0
    m32 = (1.0 + c * t) ** -3.0
    check = check_moment_bound(series_from(t, e, m32))
    assert check.mu0_hat == pytest.approx(c, rel=1e-6)
    assert check.kappa_hat == pytest.approx(1.0, rel=1e-4)
    assert check.max_violation == 0.0


def test_moment_bound_detects_horizon_growth():
    # m_3/2 decaying slower than the compensating power: kappa grows with
    # the horizon instead of stabilizing
    c = 0.0273
    t = np.linspace(0.0, 400.0, 800)
    e = (1.0 + c * t) ** -2.0
    m32 = (1.0 + c * t) ** -2.0
    half = series_from(t[:400], e[:400], m32[:400])
    full = series_from(t, e, m32)
    k_half = check_moment_bound(half).kappa_hat
    k_full = check_moment_bound(full).kappa_hat
    # compensated moment is 1 + c t here, so doubling the horizon nearly
    # doubles the sup
    assert k_full > 1.5 * k_half
    assert k_full == pytest.approx(1.0 + c * 400.0, rel=1e-3)


def test_moment_bound_rejects_non_cooling_series():
    t = np.linspace(0.0, 10.0, 100)
    with pytest.raises(InputError):
        check_moment_bound(series_from(t, np.exp(0.1 * t)))


# -------------------------------------------------- derivative decay

def test_derivative_decay_halves_with_exponential_energy():
    # E = 4 * 2^-s: |dE/ds| halves over each unit of s
    s = np.linspace(0.0, 8.0, 801)
    series = series_from(s, 4.0 * 2.0 ** -s)
    check = derivative_decay(series, s_points=[2.0, 3.0, 4.0, 5.0])
    ratios = check.values[1:] / check.values[:-1]
    np.testing.assert_allclose(ratios, 0.5, rtol=0.1)
    assert check.decreasing


def test_derivative_decay_constant_series_is_flat_and_decreasing():
    s = np.linspace(0.0, 10.0, 200)
    series = series_from(s, np.full_like(s, 2.0))
    check = derivative_decay(series)
    assert np.all(check.values == 0.0)
    assert check.decreasing


def test_derivative_decay_flags_growth():
    s = np.linspace(0.0, 10.0, 400)
    series = series_from(s, np.exp(0.05 * s ** 2 / 10.0))
    check = derivative_decay(series, noise_floor=1e-6)
    assert not check.decreasing


def test_derivative_decay_default_grid_skips_the_initial_layer():
    s = np.linspace(0.0, 50.0, 500)
    series = series_from(s, 1.0 + np.exp(-0.1 * s))
    check = derivative_decay(series, transient_fraction=0.2)
    assert check.s_points[0] >= 0.2 * s[-1] * 0.9
    assert check.s_points[-1] <= s[-1]


def test_derivative_decay_validates_sample_points():
    s = np.linspace(0.0, 10.0, 100)
    series = series_from(s, np.exp(-s / 5.0))
    with pytest.raises(InputError):
        derivative_decay(series, s_points=[1.0, 2.0, 50.0])
    with pytest.raises(InputError):
        derivative_decay(series, s_points=[1.0, 2.0])
    with pytest.raises(InputError):
        derivative_decay(series_from(s[:5], np.exp(-s[:5])))


# ------------------------------------------------------- convergence

def test_convergence_fit_recovers_a_clean_exponential():
    s = np.linspace(0.0, 30.0, 60)
    l1 = 2.0 * np.exp(-0.3 * s)
    fit = fit_convergence(s, l1, noise_floor=1e-9, tau=0.05)
    assert fit.rate_hat == pytest.approx(0.3, abs=1e-3)
    assert fit.mu_e_check == pytest.approx(0.3 / 0.05, rel=1e-3)
    assert fit.r2 > 0.999999
    assert fit.reliable
    assert fit.n_points == 60


def test_convergence_fit_ignores_points_at_the_noise_floor():
    s = np.linspace(0.0, 40.0, 80)
    floor = 0.03
    l1 = np.maximum(2.0 * np.exp(-0.3 * s), floor)
    fit = fit_convergence(s, l1, noise_floor=floor, tau=0.05)
    assert fit.n_points < 80
    assert fit.rate_hat == pytest.approx(0.3, abs=5e-3)
    assert fit.reliable


def test_convergence_fit_goes_unreliable_without_signal():
    s = np.linspace(0.0, 10.0, 20)
    l1 = np.full_like(s, 0.01)
    fit = fit_convergence(s, l1, noise_floor=0.01, tau=0.05)
    assert not fit.reliable
    assert fit.n_points == 0
    assert math.isnan(fit.rate_hat)


def test_convergence_fit_validates_inputs():
    with pytest.raises(InputError):
        fit_convergence([0.0, 1.0], [1.0], noise_floor=0.0, tau=0.05)
    with pytest.raises(InputError):
        fit_convergence([0.0, 1.0], [1.0, 0.5], noise_floor=-1.0, tau=0.05)


# ------------------------------------------------------- noise floor

def test_noise_floor_scales_with_sample_count():
    ens = init_ensemble(20_000, 3, "maxwellian", 0)
    hist = radial_histogram(ens, bins=64, v_max=4.0)
    f_small = bootstrap_noise_floor(hist, seed=1, n_samples=500)
    f_large = bootstrap_noise_floor(hist, seed=1, n_samples=50_000)
    assert f_small > 3.0 * f_large
    # sqrt scaling within a loose band
    assert f_small / f_large == pytest.approx(10.0, rel=0.35)


def test_noise_floor_is_deterministic_and_positive():
    ens = init_ensemble(2000, 3, "maxwellian", 5)
    hist = radial_histogram(ens, bins=32, v_max=4.0)
    f1 = bootstrap_noise_floor(hist, seed=7)
    f2 = bootstrap_noise_floor(hist, seed=7)
    assert f1 == f2 > 0.0
    assert bootstrap_noise_floor(hist, seed=8) != f1


def test_noise_floor_validates_arguments():
    ens = init_ensemble(100, 3, "maxwellian", 0)
    hist = radial_histogram(ens, bins=8, v_max=4.0)
    with pytest.raises(InputError):
        bootstrap_noise_floor(hist, resamples=1)
    with pytest.raises(InputError):
        bootstrap_noise_floor(hist, n_samples=0)
