"""Candidate-pair stochastic collision solver (no-time-counter scheme).

A step of size dt freezes the rate factor lam = E^-a at the step start and
draws

    M = ceil(1/2 n dt lam u_max kappa_b)

candidate pairs uniformly (i != j), accepting each with probability
|u_ij| / u_max.  kappa_b is the sphere mass of the angular weight, 1 under
the unit-mass hypothesis.  u_max is a majorant on pairwise relative speeds,
refreshed every REFRESH_INTERVAL steps as twice the exact maximum speed.  A
sampled pair exceeding u_max aborts the step: the pre-step state is
restored, the majorant refreshed, and the step redone with fresh draws
(speeds are never clipped).

Candidates are processed in draw order.  Each batch round handles the
candidates whose particles have not been touched earlier in the step and
defers the rest to the next round with their acceptance uniforms, which
reproduces sequential processing exactly while staying vectorized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensemble import MomentSeries, VelocityEnsemble, init_ensemble
from .errors import CorruptedStateError, InputError
from .kernel import KernelConfig, sample_omegas

__all__ = [
    "DsmcState",
    "dsmc_step",
    "choose_dt",
    "run_physical",
    "relative_speed_majorant",
]

REFRESH_INTERVAL = 50
MAX_STEP_REDO = 100
EPSILON_STOP_DEFAULT = 1e-6


def relative_speed_majorant(velocities: np.ndarray) -> float:
    """Twice the maximum speed bounds every pairwise relative speed."""
    s2 = np.einsum("ij,ij->i", velocities, velocities)
    return 2.0 * math.sqrt(float(s2.max()))


class _MajorantBreach(Exception):
    pass


def _clean_pair_mask(i: np.ndarray, j: np.ndarray, n: int) -> np.ndarray:
    # A pair is clean when both of its particle slots are the first
    # occurrence of those particles in the interleaved candidate list.
    m = i.size
    flat = np.empty(2 * m, dtype=np.int64)
    flat[0::2] = i
    flat[1::2] = j
    uniq, first = np.unique(flat, return_index=True)
    pos = np.empty(n, dtype=np.int64)
    pos[uniq] = first
    own = pos[flat] == np.arange(2 * m)
    return own[0::2] & own[1::2]


def _attempt_substep(vel, rng, u_max, n_candidates, config, want_log):
    n = vel.shape[0]
    if n_candidates <= 0:
        return 0, 0.0, (None, None)
    ii = rng.integers(0, n, n_candidates)
    jj = rng.integers(0, n - 1, n_candidates)
    jj = jj + (jj >= ii)  # uniform over j != i
    xi = rng.random(n_candidates)
    e = config.e
    n_coll = 0
    delta_e = 0.0
    log_umag = [] if want_log else None
    log_g = [] if want_log else None
    pi, pj, pxi = ii, jj, xi
    while pi.size:
        u = vel[pi] - vel[pj]
        umag = np.sqrt(np.einsum("ij,ij->i", u, u))
        if float(umag.max()) > u_max:
            raise _MajorantBreach
        clean = _clean_pair_mask(pi, pj, n)
        accept = pxi[clean] * u_max < umag[clean]
        if accept.any():
            ci, cj = pi[clean][accept], pj[clean][accept]
            cu, cmag = u[clean][accept], umag[clean][accept]
            u_hat = cu / cmag[:, None]
            omegas = sample_omegas(u_hat, config, rng)
            g = np.einsum("ij,ij->i", cu, omegas)
            impulse = (0.5 * (1.0 + e) * g)[:, None] * omegas
            # Clean pairs never share particles, so the scatter is safe.
            vel[ci] -= impulse
            vel[cj] += impulse
            n_coll += ci.size
            delta_e += float(np.sum(-0.5 * (1.0 - e * e) * g * g))
            if want_log:
                log_umag.append(cmag)
                log_g.append(g)
        deferred = ~clean
        pi, pj, pxi = pi[deferred], pj[deferred], pxi[deferred]
    return n_coll, delta_e, (log_umag, log_g)


def ntc_substep(vel, rng, u_max, dt, lam, config, recorder=None):
    """One collision substep on the velocity array, in place.

    Returns (n_collisions, summed_delta_energy, u_max) where u_max may have
    been refreshed by majorant-breach handling.  recorder, when given, is a
    list that receives one (relative_speed, normal_component) array pair per
    step for accepted collisions.
    """
    n = vel.shape[0]
    want_log = recorder is not None
    snapshot = vel.copy()
    for _ in range(MAX_STEP_REDO):
        m = math.ceil(0.5 * n * dt * lam * u_max * config.sphere_mass)
        try:
            n_coll, delta_e, logs = _attempt_substep(
                vel, rng, u_max, m, config, want_log)
        except _MajorantBreach:
            vel[:] = snapshot
            u_max = relative_speed_majorant(vel)
            continue
        if want_log and logs[0]:
            recorder.append((np.concatenate(logs[0]), np.concatenate(logs[1])))
        return n_coll, delta_e, u_max
    raise RuntimeError("majorant breach persisted across redo attempts")


@dataclass
class DsmcState:
    """Mutable state of a physical-frame run."""

    ens: VelocityEnsemble
    config: KernelConfig
    rng: np.random.Generator
    t: float = 0.0
    u_max: float = 0.0
    n_collisions: int = 0
    n_steps: int = 0
    stats: MomentSeries = field(default=None)

    def __post_init__(self):
        if self.ens.dim != self.config.dim:
            raise InputError("ensemble and kernel dimensions differ")
        if self.u_max <= 0.0:
            self.u_max = relative_speed_majorant(self.ens.velocities)
        if self.stats is None:
            self.stats = MomentSeries(self.ens.dim)


def choose_dt(state: DsmcState, c_target: float) -> float:
    """Step size c_target / (lam * u_max), the candidate-load controller.

    c_target ~ 0.05 keeps the per-step relative energy change well below
    2 percent for any restitution.  lam = E^-a is evaluated on the current
    ensemble, so dt shrinks toward a blow-up (a > 1/2) and grows as a
    sub-critical gas cools.
    """
    if not c_target > 0:
        raise InputError(f"c_target must be > 0, got {c_target}")
    energy = state.ens.energy()
    if not energy > 0:
        raise InputError("cannot choose a step for a zero-energy ensemble")
    lam = energy ** (-state.config.a)
    return c_target / (lam * state.u_max)


def dsmc_step(state: DsmcState, dt: float, recorder=None) -> None:
    """Advance the state by one collision step of size dt and record stats."""
    if not dt > 0:
        raise InputError(f"dt must be > 0, got {dt}")
    vel = state.ens.velocities
    energy = state.ens.energy()
    if not np.isfinite(energy):
        raise CorruptedStateError(
            "non-finite energy before step", snapshot=vel.copy(), t=state.t)
    if not energy > 0:
        raise InputError("cannot step a zero-energy ensemble")
    lam = energy ** (-state.config.a)
    n_coll, _, u_max = ntc_substep(
        vel, state.rng, state.u_max, dt, lam, state.config, recorder)
    state.u_max = u_max
    state.t += dt
    state.n_collisions += n_coll
    state.n_steps += 1
    if state.n_steps % REFRESH_INTERVAL == 0:
        if not np.all(np.isfinite(vel)):
            raise CorruptedStateError(
                "non-finite velocities", snapshot=None, t=state.t)
        state.u_max = relative_speed_majorant(vel)
    state.stats.record_ensemble(state.t, state.ens, state.n_collisions, dt)


def run_physical(config: KernelConfig, n: int, seed, *,
                 epsilon_stop: float = EPSILON_STOP_DEFAULT,
                 t_max: float = math.inf,
                 c_target: float = 0.05,
                 init: str = "maxwellian",
                 recorder=None,
                 step_hook=None):
    """Run the physical-frame cascade until E < epsilon_stop or t >= t_max.

    Returns (series, state, halt_reason) with halt_reason one of
    "blow-up-resolved" (energy floor reached) or "horizon" (time limit).
    Identical (config, n, seed) arguments reproduce the series bit for bit.
    step_hook(state) runs after every accepted step; it must not mutate the
    state if reproducibility matters.
    """
    if not (0.0 < epsilon_stop < 1.0):
        raise InputError(f"epsilon_stop must lie in (0, 1), got {epsilon_stop}")
    if not t_max > 0:
        raise InputError(f"t_max must be > 0, got {t_max}")
    if not math.isfinite(t_max) and epsilon_stop <= 0:
        raise InputError("need a finite horizon or a positive energy floor")
    seq = np.random.SeedSequence(seed)
    init_seed, run_seed = seq.spawn(2)
    ens = init_ensemble(n, config.dim, init, init_seed)
    state = DsmcState(ens=ens, config=config,
                      rng=np.random.default_rng(run_seed))
    state.stats.record_ensemble(0.0, ens, 0, 0.0)
    snapshot = ens.velocities.copy()
    snapshot_t = 0.0
    while True:
        energy = state.ens.energy()
        if not np.isfinite(energy):
            raise CorruptedStateError(
                "energy became non-finite", snapshot=snapshot, t=snapshot_t)
        if energy < epsilon_stop:
            reason = "blow-up-resolved"
            break
        if state.t >= t_max:
            reason = "horizon"
            break
        if state.n_steps % REFRESH_INTERVAL == 0:
            # Refresh the recovery snapshot on the same cadence as the
            # periodic finiteness scan inside dsmc_step.
            snapshot = state.ens.velocities.copy()
            snapshot_t = state.t
        dt = choose_dt(state, c_target)
        dsmc_step(state, dt, recorder)
        if step_hook is not None:
            step_hook(state)
    return state.stats, state, reason
