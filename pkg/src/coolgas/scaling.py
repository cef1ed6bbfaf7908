"""Maps between the physical and rescaled frames.

The scale factor V solves V'(t) = tau E(t)^-a with V(0) = 1, and the
rescaled clock is T(t) = log(V(t)) / tau.  Energies in the two frames are
tied together by

    E_rescaled(T(t)) = V(t)^2 E_physical(t),

which verify_energy_coupling checks on a pair of independently produced
runs.  V is also (E_rescaled / E_physical)^(1/2) along the map, giving a
second route to the same factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import VelocityEnsemble
from .errors import InputError

__all__ = [
    "ScalingMap",
    "build_scaling_map",
    "verify_energy_coupling",
    "map_ensemble_to_rescaled",
]


@dataclass(frozen=True)
class ScalingMap:
    """Tabulated scale factor V and rescaled clock T on a physical grid."""

    t_grid: np.ndarray
    V: np.ndarray
    T: np.ndarray
    tau: float
    a: float

    def __post_init__(self):
        if not (self.t_grid.shape == self.V.shape == self.T.shape):
            raise InputError("scaling map arrays must share one shape")
        if np.any(np.diff(self.V) <= 0):
            raise InputError("V must be strictly increasing")


def build_scaling_map(series, tau: float, a: float) -> ScalingMap:
    """Integrate V' = tau E^-a over the series grid by the trapezoid rule.

    Each increment of V lies between the interval extremes of the
    integrand, so V inherits strict monotonicity from tau > 0.
    """
    if not tau > 0:
        raise InputError(f"tau must be > 0 to build a scaling map, got {tau}")
    if not a >= 0:
        raise InputError(f"a must be >= 0, got {a}")
    t = series.t
    energy = series.E
    if len(t) < 2:
        raise InputError("need at least two records to build a scaling map")
    if np.any(energy <= 0):
        raise InputError("series has nonpositive energy records")
    integrand = tau * energy ** (-a)
    steps = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t)
    v = np.empty_like(t)
    v[0] = 1.0
    v[1:] = 1.0 + np.cumsum(steps)
    return ScalingMap(t_grid=t, V=v, T=np.log(v) / tau, tau=tau, a=a)


def verify_energy_coupling(physical, rescaled, smap: ScalingMap) -> float:
    """Max relative error of E_rescaled(T(t)) = V(t)^2 E_physical(t).

    physical and rescaled are moment series; the rescaled series must cover
    the mapped clock range [0, T(t_end)].  Interpolation of the rescaled
    energy is linear in log E.
    """
    t_phys = physical.t
    e_phys = physical.E
    if not np.array_equal(t_phys, smap.t_grid):
        raise InputError("scaling map was built on a different time grid")
    s_grid = rescaled.t
    e_resc = rescaled.E
    if np.any(e_resc <= 0) or np.any(e_phys <= 0):
        raise InputError("coupling check needs positive energies")
    t_clock = smap.T
    if t_clock[-1] > s_grid[-1] * (1.0 + 1e-12) + 1e-12:
        raise InputError(
            f"rescaled series ends at s={s_grid[-1]:.6g} but the map "
            f"needs coverage to T={t_clock[-1]:.6g}")
    log_e = np.interp(np.clip(t_clock, s_grid[0], s_grid[-1]),
                      s_grid, np.log(e_resc))
    lhs = np.exp(log_e)
    rhs = smap.V ** 2 * e_phys
    return float(np.max(np.abs(lhs - rhs) / lhs))


def map_ensemble_to_rescaled(ens: VelocityEnsemble, v_t: float) -> VelocityEnsemble:
    """Rescale every velocity by the scale factor V(t)."""
    if not v_t > 0:
        raise InputError(f"scale factor must be > 0, got {v_t}")
    return VelocityEnsemble(ens.velocities * v_t)
