"""Ensemble state, moments, histograms, and series recording."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erf

from coolgas import (
    DISTRIBUTIONS, MomentSeries, ProfileHistogram, VelocityEnsemble,
    average_histograms, init_ensemble, moment, radial_histogram,
)
from coolgas.errors import InputError


# ------------------------------------------------------------- ensembles

def test_ensemble_requires_two_particles():
    with pytest.raises(InputError):
        VelocityEnsemble(np.zeros((1, 3)))


def test_ensemble_rejects_non_finite():
    vel = np.zeros((4, 3))
    vel[2, 1] = np.nan
    with pytest.raises(InputError):
        VelocityEnsemble(vel)


def test_two_particle_moments_exact():
    w = np.array([0.5, -1.0, 2.0])
    ens = VelocityEnsemble(np.stack([w, -w]))
    w2 = float(np.dot(w, w))
    assert ens.energy() == pytest.approx(w2, rel=1e-15)
    assert moment(ens, 1.0) == ens.energy()
    assert moment(ens, 0.5) == pytest.approx(np.sqrt(w2), rel=1e-14)
    assert moment(ens, 1.5) == pytest.approx(w2 ** 1.5, rel=1e-14)
    np.testing.assert_array_equal(ens.mean_momentum(), np.zeros(3))


def test_moment_order_zero_is_exactly_one():
    ens = init_ensemble(50, 3, "maxwellian", 0)
    assert moment(ens, 0.0) == 1.0


@settings(max_examples=50, deadline=None)
@given(ell=st.floats(0.25, 2.5), k=st.integers(-3, 3))
def test_moment_homogeneity(ell, k):
    # moment of scaled velocities picks up the factor c^(2 ell)
    base = init_ensemble(64, 3, "maxwellian", 12)
    c = 2.0 ** k
    scaled = VelocityEnsemble(base.velocities * c)
    assert moment(scaled, ell) == pytest.approx(
        c ** (2 * ell) * moment(base, ell), rel=1e-12)


@pytest.mark.parametrize("dist", DISTRIBUTIONS)
def test_init_ensemble_is_normalized(dist):
    ens = init_ensemble(5000, 3, dist, 42)
    assert ens.energy() == pytest.approx(1.0, abs=1e-13)
    assert np.max(np.abs(ens.mean_momentum())) < 1e-14


def test_init_ensemble_deterministic_and_seed_sensitive():
    a = init_ensemble(100, 3, "maxwellian", 7)
    b = init_ensemble(100, 3, "maxwellian", 7)
    c = init_ensemble(100, 3, "maxwellian", 8)
    np.testing.assert_array_equal(a.velocities, b.velocities)
    assert not np.array_equal(a.velocities, c.velocities)


def test_init_ensemble_unknown_distribution():
    with pytest.raises(InputError):
        init_ensemble(10, 3, "lattice", 0)


def test_maxwellian_fourth_moment():
    # E|v|^4 = 1 + 2/d for a unit-energy Maxwellian
    for dim in (2, 3):
        ens = init_ensemble(100_000, dim, "maxwellian", 3)
        assert moment(ens, 2.0) == pytest.approx(1 + 2 / dim, rel=0.02)


def test_two_temperature_has_heavier_tail_than_maxwellian():
    hot = init_ensemble(50_000, 3, "two-temperature", 5)
    ref = init_ensemble(50_000, 3, "maxwellian", 5)
    assert moment(hot, 2.0) > moment(ref, 2.0)


def test_normalize_rejects_zero_spread():
    ens = VelocityEnsemble(np.ones((4, 3)))
    with pytest.raises(InputError):
        ens.normalize_to_g()


def test_normalize_idempotent():
    rng = np.random.default_rng(9)
    ens = VelocityEnsemble(rng.normal(2.0, 3.0, size=(500, 3)))
    ens.normalize_to_g()
    before = ens.velocities.copy()
    ens.normalize_to_g()
    np.testing.assert_allclose(ens.velocities, before, rtol=0, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 200))
def test_moment_interpolation_inequalities(seed, n):
    """Convexity of p -> log m_p on every ensemble, with roundoff slack."""
    rng = np.random.default_rng(seed)
    ens = VelocityEnsemble(rng.normal(size=(n, 3)) * rng.uniform(0.1, 10))
    m_half = moment(ens, 0.5)
    m1 = moment(ens, 1.0)
    m32 = moment(ens, 1.5)
    m2 = moment(ens, 2.0)
    slack = 1 + 1e-12
    assert m1 ** 1.5 <= m32 * slack
    assert m_half ** 2 <= m1 * slack
    assert m32 ** (4.0 / 3.0) <= m2 * slack


# ------------------------------------------------------------ histograms

def test_radial_histogram_masses_and_overflow():
    vel = np.zeros((4, 3))
    vel[:, 0] = [0.5, 1.5, 2.5, 9.0]
    ens = VelocityEnsemble(vel)
    hist = radial_histogram(ens, bins=8, v_max=4.0)
    assert hist.masses.sum() + hist.overflow == pytest.approx(1.0, abs=1e-15)
    assert hist.overflow == pytest.approx(0.25)
    assert hist.n_samples == 4
    assert hist.masses[1] == pytest.approx(0.25)   # 0.5 in [0.5, 1.0)


def test_radial_histogram_validates_arguments():
    ens = init_ensemble(10, 3, "maxwellian", 0)
    with pytest.raises(InputError):
        radial_histogram(ens, bins=4, v_max=4.0)
    with pytest.raises(InputError):
        radial_histogram(ens, bins=16, v_max=0.0)


def test_profile_histogram_validates_edges_and_mass():
    with pytest.raises(InputError):
        ProfileHistogram(bin_edges=np.array([0.0, 1.0, 1.0]),
                         masses=np.array([0.5, 0.5]), overflow=0.0,
                         n_samples=10)
    with pytest.raises(InputError):
        ProfileHistogram(bin_edges=np.array([0.0, 1.0, 2.0]),
                         masses=np.array([0.5, 0.4]), overflow=0.0,
                         n_samples=10)


def test_average_histograms_mean_and_errors():
    ens1 = init_ensemble(1000, 3, "maxwellian", 1)
    ens2 = init_ensemble(1000, 3, "maxwellian", 2)
    h1 = radial_histogram(ens1, bins=16, v_max=4.0)
    h2 = radial_histogram(ens2, bins=16, v_max=4.0)
    avg = average_histograms([h1, h2])
    np.testing.assert_allclose(avg.masses, 0.5 * (h1.masses + h2.masses),
                               atol=1e-16)
    assert avg.n_samples == 2000
    h3 = radial_histogram(ens1, bins=16, v_max=5.0)
    with pytest.raises(InputError):
        average_histograms([h1, h3])
    with pytest.raises(InputError):
        average_histograms([])


def test_maxwellian_speed_histogram_matches_closed_form():
    # bin masses from the speed CDF of the unit-energy Maxwellian, d=3
    ens = init_ensemble(20_000, 3, "maxwellian", 21)
    hist = radial_histogram(ens, bins=32, v_max=4.0)
    sig = 1.0 / np.sqrt(3.0)
    cdf = lambda v: (erf(v / (sig * np.sqrt(2)))
                     - np.sqrt(2 / np.pi) * (v / sig)
                     * np.exp(-v * v / (2 * sig * sig)))
    exact = np.diff(cdf(hist.bin_edges))
    l1 = np.abs(hist.masses - exact).sum() + abs(
        hist.overflow - (1.0 - cdf(4.0)))
    assert l1 < 0.05


# ---------------------------------------------------------------- series

def test_series_records_match_direct_moments():
    series = MomentSeries(3)
    ens = init_ensemble(100, 3, "maxwellian", 4)
    series.record_ensemble(0.0, ens, 0, 0.0)
    series.record_ensemble(1.0, ens, 5, 0.5)
    assert series.E[1] == pytest.approx(ens.energy(), rel=1e-14)
    assert series.m_half[1] == pytest.approx(moment(ens, 0.5), rel=1e-14)
    assert series.m_three_half[1] == pytest.approx(
        moment(ens, 1.5), rel=1e-14)
    assert series.n_collisions[1] == 5
    np.testing.assert_allclose(series.momentum[1], ens.mean_momentum())


def test_series_rejects_non_increasing_time():
    series = MomentSeries(3)
    series.append(t=0.0, energy=1.0, m_half=1.0, m_three_half=1.0,
                  momentum=np.zeros(3), n_collisions=0, dt=0.0)
    with pytest.raises(InputError):
        series.append(t=0.0, energy=0.9, m_half=1.0, m_three_half=1.0,
                      momentum=np.zeros(3), n_collisions=1, dt=0.1)


def test_series_truncated_is_prefix():
    series = MomentSeries(3)
    for k in range(10):
        series.append(t=float(k), energy=1.0 / (1 + k), m_half=1.0,
                      m_three_half=1.0, momentum=np.zeros(3),
                      n_collisions=k, dt=0.1)
    head = series.truncated(4.5)
    assert len(head.t) == 5
    np.testing.assert_array_equal(head.E, series.E[:5])


def test_series_validate_flags_moment_inconsistency():
    series = MomentSeries(3)
    series.append(t=0.0, energy=4.0, m_half=1.0, m_three_half=1.0,
                  momentum=np.zeros(3), n_collisions=0, dt=0.0)
    with pytest.raises(InputError):
        series.validate()   # m_3/2 = 1 < E^1.5 = 8
