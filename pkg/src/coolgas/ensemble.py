"""Velocity ensembles, moments, and radial histograms.

An ensemble is n equal-weight particles in d dimensions.  Normalization to
the reference class (zero mean velocity, unit kinetic energy per particle)
happens once at initialization; the mean momentum is never re-zeroed during
a run, its drift is a roundoff diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "VelocityEnsemble",
    "ProfileHistogram",
    "MomentSeries",
    "init_ensemble",
    "moment",
    "radial_histogram",
    "average_histograms",
]

DISTRIBUTIONS = ("maxwellian", "uniform-ball", "two-temperature")


@dataclass
class VelocityEnsemble:
    """n x d array of particle velocities with equal weights 1/n."""

    velocities: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.velocities, dtype=np.float64)
        if v.ndim != 2:
            raise InputError("velocities must be a 2-d array (n, dim)")
        if v.shape[0] < 2:
            raise InputError(f"need at least 2 particles, got {v.shape[0]}")
        if v.shape[1] < 1:
            raise InputError("velocity dimension must be >= 1")
        if not np.all(np.isfinite(v)):
            raise InputError("velocities must be finite")
        self.velocities = v

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    @property
    def dim(self) -> int:
        return self.velocities.shape[1]

    def copy(self) -> "VelocityEnsemble":
        return VelocityEnsemble(self.velocities.copy())

    def speeds(self) -> np.ndarray:
        return np.sqrt(np.einsum("ij,ij->i", self.velocities, self.velocities))

    def energy(self) -> float:
        """Mean squared speed (kinetic energy at unit mass)."""
        v = self.velocities
        return float(np.einsum("ij,ij->", v, v)) / self.n

    def mean_momentum(self) -> np.ndarray:
        return self.velocities.mean(axis=0)

    def normalize_to_g(self) -> "VelocityEnsemble":
        """Shift to zero mean velocity and rescale to unit energy, in place."""
        v = self.velocities
        v -= v.mean(axis=0)
        energy = float(np.einsum("ij,ij->", v, v)) / self.n
        if not energy > 0.0:
            raise InputError("ensemble has zero centered energy; cannot normalize")
        v *= 1.0 / np.sqrt(energy)
        return self


def init_ensemble(n, dim, distribution="maxwellian", seed=0) -> VelocityEnsemble:
    """Draw n velocities from a named distribution and normalize.

    distribution: "maxwellian" (isotropic Gaussian), "uniform-ball"
    (uniform over a solid sphere), or "two-temperature" (half the particles
    at 4x the temperature of the rest).  Deterministic given seed.
    """
    if n < 2:
        raise InputError(f"need at least 2 particles, got {n}")
    if dim < 2:
        raise InputError(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    if distribution == "maxwellian":
        v = rng.standard_normal((n, dim))
    elif distribution == "uniform-ball":
        dirs = rng.standard_normal((n, dim))
        dirs /= np.sqrt(np.einsum("ij,ij->i", dirs, dirs))[:, None]
        radii = rng.random(n) ** (1.0 / dim)
        v = dirs * radii[:, None]
    elif distribution == "two-temperature":
        v = rng.standard_normal((n, dim))
        v[n // 2:] *= 2.0
    else:
        raise InputError(
            f"unknown distribution {distribution!r}; choose from {DISTRIBUTIONS}"
        )
    return VelocityEnsemble(v).normalize_to_g()


def moment(ens: VelocityEnsemble, ell: float) -> float:
    """Moment m_ell = (1/n) sum |v_i|^(2 ell) for ell >= 0.

    Uses numpy's pairwise summation, so roundoff stays near machine level
    even for large n.
    """
    if ell < 0:
        raise InputError(f"moment order must be >= 0, got {ell}")
    if ell == 0:
        return 1.0
    v = ens.velocities
    s2 = np.einsum("ij,ij->i", v, v)
    if ell == 1.0:
        return float(np.sum(s2)) / ens.n
    return float(np.sum(s2 ** ell)) / ens.n


@dataclass(frozen=True)
class ProfileHistogram:
    """Normalized speed histogram with an explicit overflow mass.

    masses are per-bin probability masses over [bin_edges[0], bin_edges[-1]);
    overflow holds the mass at or above the last edge.  Total mass is 1.
    """

    bin_edges: np.ndarray
    masses: np.ndarray
    overflow: float
    n_samples: int

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if edges.ndim != 1 or masses.ndim != 1 or edges.size != masses.size + 1:
            raise InputError("need len(bin_edges) == len(masses) + 1")
        if not np.all(np.diff(edges) > 0):
            raise InputError("bin edges must be strictly increasing")
        if masses.min() < -1e-15 or self.overflow < -1e-15:
            raise InputError("histogram masses must be nonnegative")
        total = float(np.sum(masses)) + self.overflow
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"histogram mass must be 1, got {total:.15g}")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "masses", masses)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)


def radial_histogram(ens: VelocityEnsemble, bins: int, v_max: float) -> ProfileHistogram:
    """Histogram of speeds on [0, v_max) with uniform bins plus overflow."""
    if bins < 8:
        raise InputError(f"need at least 8 bins, got {bins}")
    if not v_max > 0:
        raise InputError(f"v_max must be > 0, got {v_max}")
    speeds = ens.speeds()
    inside = speeds < v_max
    counts, edges = np.histogram(speeds[inside], bins=bins, range=(0.0, v_max))
    n = ens.n
    return ProfileHistogram(
        bin_edges=edges,
        masses=counts / n,
        overflow=float(n - counts.sum()) / n,
        n_samples=n,
    )


def average_histograms(hists) -> ProfileHistogram:
    """Mean of histograms sharing identical bin edges."""
    hists = list(hists)
    if not hists:
        raise InputError("cannot average zero histograms")
    edges = hists[0].bin_edges
    for h in hists[1:]:
        if not np.array_equal(h.bin_edges, edges):
            raise InputError("histograms have mismatched bin edges")
    masses = np.mean([h.masses for h in hists], axis=0)
    overflow = float(np.mean([h.overflow for h in hists]))
    n_samples = int(sum(h.n_samples for h in hists))
    return ProfileHistogram(edges, masses, overflow, n_samples)


class MomentSeries:
    """Per-record time series of moments and run counters.

    Each record holds (t, E, m_half, m_three_half, momentum vector,
    cumulative collision count, step size).  Times must be appended in
    strictly increasing order after the first record.
    """

    __slots__ = ("dim", "_t", "_E", "_m_half", "_m_three_half", "_p",
                 "_n_coll", "_dt")

    def __init__(self, dim: int):
        self.dim = dim
        self._t = []
        self._E = []
        self._m_half = []
        self._m_three_half = []
        self._p = []
        self._n_coll = []
        self._dt = []

    def __len__(self) -> int:
        return len(self._t)

    def append(self, t, energy, m_half, m_three_half, momentum, n_collisions, dt):
        if self._t and not t > self._t[-1]:
            raise InputError(
                f"record times must increase strictly: {t} after {self._t[-1]}"
            )
        if not energy >= 0.0:
            raise InputError(f"energy must be >= 0, got {energy}")
        momentum = np.asarray(momentum, dtype=float)
        if momentum.shape != (self.dim,):
            raise InputError("momentum vector has wrong dimension")
        self._t.append(float(t))
        self._E.append(float(energy))
        self._m_half.append(float(m_half))
        self._m_three_half.append(float(m_three_half))
        self._p.append(momentum)
        self._n_coll.append(int(n_collisions))
        self._dt.append(float(dt))

    def record_ensemble(self, t, ens: VelocityEnsemble, n_collisions, dt):
        """Compute and append the standard moment set for an ensemble."""
        speeds = ens.speeds()
        s2 = speeds * speeds
        n = ens.n
        self.append(
            t=t,
            energy=float(np.sum(s2)) / n,
            m_half=float(np.sum(speeds)) / n,
            m_three_half=float(np.sum(s2 * speeds)) / n,
            momentum=ens.mean_momentum(),
            n_collisions=n_collisions,
            dt=dt,
        )

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self._t, dtype=float)

    @property
    def E(self) -> np.ndarray:
        return np.asarray(self._E, dtype=float)

    @property
    def m_half(self) -> np.ndarray:
        return np.asarray(self._m_half, dtype=float)

    @property
    def m_three_half(self) -> np.ndarray:
        return np.asarray(self._m_three_half, dtype=float)

    @property
    def momentum(self) -> np.ndarray:
        return np.asarray(self._p, dtype=float)

    @property
    def n_collisions(self) -> np.ndarray:
        return np.asarray(self._n_coll, dtype=np.int64)

    @property
    def dt(self) -> np.ndarray:
        return np.asarray(self._dt, dtype=float)

    def truncated(self, t_max: float) -> "MomentSeries":
        """Prefix of the series with t <= t_max."""
        out = MomentSeries(self.dim)
        for k, t in enumerate(self._t):
            if t > t_max:
                break
            out.append(t, self._E[k], self._m_half[k], self._m_three_half[k],
                       self._p[k], self._n_coll[k], self._dt[k])
        return out

    def validate(self):
        """Check ordering, positivity, and the m_1 <= m_3/2^(2/3) relation."""
        t = self.t
        if len(t) and not np.all(np.diff(t) > 0):
            raise InputError("record times are not strictly increasing")
        energy = self.E
        if len(energy) and energy.min() < 0:
            raise InputError("negative energy record")
        m32 = self.m_three_half
        # Hoelder with unit mass: E^(3/2) <= m_3/2, up to summation roundoff.
        if len(m32) and np.any(m32 < energy ** 1.5 * (1.0 - 1e-12)):
            raise InputError("moment records violate the Hoelder relation")
