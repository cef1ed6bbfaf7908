"""Inelastic hard-sphere collision microphysics.

Two particles with velocities v, v* colliding along a unit impact direction
omega exchange momentum along omega only:

    v'  = v  - (1+e)/2 (u . omega) omega,        u = v - v*,
    v*' = v* + (1+e)/2 (u . omega) omega,

with restitution e in [0, 1].  The same impulse vector is subtracted from one
particle and added to the other, so momentum is conserved by construction,
and kinetic energy changes by the exact identity

    |v'|^2 + |v*'|^2 - |v|^2 - |v*|^2 = -(1-e^2)/2 (u . omega)^2 <= 0.

Impact directions are weighted by a user-supplied angular function b1 applied
to u_hat . omega.  b1 must be bounded between beta1 and beta2 (both positive)
and carry unit mass over the sphere:

    integral_{S^{d-1}} b1(u_hat . omega) d omega = 1.

The collision rate additionally carries a factor E^-a of the current kinetic
energy; that factor lives in the transport loop, not here.  This module only
knows the angular weight and the per-collision identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi

from .errors import InputError, KernelError

__all__ = [
    "KernelConfig",
    "CollisionOutcome",
    "collide",
    "collide_pairs",
    "sample_omega",
    "sample_omegas",
    "dissipation_rate",
    "dissipation_lower_bound",
    "sphere_area",
    "sphere_integral",
    "isotropic_b1",
    "linear_b1",
]

# Relative tolerance for the unit-mass check on b1.
MASS_RTOL = 1e-6
# Gauss-Jacobi order for angular integrals; exact for polynomial b1 up to
# degree 2*QUAD_ORDER - 3 and far below 1e-8 relative error for smooth b1.
QUAD_ORDER = 64
# Rejection sampling guard against misconfigured beta2.
MAX_REJECTION_ROUNDS = 1_000_000


def sphere_area(m: int) -> float:
    """Surface measure of the unit m-sphere embedded in R^(m+1)."""
    if m < 0:
        raise InputError(f"sphere dimension must be >= 0, got {m}")
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def _jacobi_rule(dim: int):
    # Nodes/weights for integral f(x) (1-x^2)^((d-3)/2) dx on [-1, 1],
    # the weight picked up when a sphere integral is reduced to the
    # cosine x = u_hat . omega.
    alpha = 0.5 * (dim - 3)
    return roots_jacobi(QUAD_ORDER, alpha, alpha)


_RULE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def sphere_integral(f: Callable, dim: int) -> float:
    """Integral of f(u_hat . omega) over the unit sphere S^(dim-1)."""
    if dim < 2:
        raise InputError(f"dim must be >= 2, got {dim}")
    if dim not in _RULE_CACHE:
        _RULE_CACHE[dim] = _jacobi_rule(dim)
    nodes, weights = _RULE_CACHE[dim]
    vals = np.asarray(f(nodes), dtype=float)
    return sphere_area(dim - 2) * float(np.dot(weights, vals))


def isotropic_b1(dim: int) -> Callable:
    """Constant angular weight with unit sphere mass."""
    c = 1.0 / sphere_area(dim - 1)

    def b1(x):
        return np.full_like(np.asarray(x, dtype=float), c)

    return b1


def linear_b1(coeff: float, dim: int) -> Callable:
    """Angular weight (1 + coeff*x) / |S^(d-1)|, unit mass for any |coeff| < 1.

    The linear term is odd so it drops out of the sphere mass; it biases
    impact directions toward (coeff > 0) or away from (coeff < 0) the
    relative velocity.
    """
    if not abs(coeff) < 1.0:
        raise KernelError(f"linear anisotropy needs |coeff| < 1, got {coeff}")
    z = sphere_area(dim - 1)

    def b1(x):
        return (1.0 + coeff * np.asarray(x, dtype=float)) / z

    return b1


@dataclass(frozen=True)
class KernelConfig:
    """Collision kernel parameters.

    e: restitution in [0, 1]; e = 1 is elastic and only allowed when
       allow_elastic is set (diagnostics mode).
    a: anomaly exponent of the energy-dependent rate factor E^-a, a >= 0.
    tau: drift strength used by the rescaled-frame solver, tau >= 0.
    b1: angular weight on [-1, 1]; must satisfy the bounds and unit-mass
        hypotheses (checked numerically at construction).
    beta1, beta2: lower/upper bounds for b1.
    dim: velocity dimension, >= 2.
    """

    e: float
    a: float
    tau: float
    b1: Callable
    beta1: float
    beta2: float
    dim: int
    allow_elastic: bool = False
    sphere_mass: float = field(init=False, default=0.0)
    angular_msq: float = field(init=False, default=0.0)

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2:
            raise KernelError(f"dim must be an integer >= 2, got {self.dim}")
        if not (0.0 <= self.e <= 1.0):
            raise KernelError(f"restitution must lie in [0, 1], got {self.e}")
        if self.e == 1.0 and not self.allow_elastic:
            raise KernelError(
                "e = 1 is elastic; pass allow_elastic=True to run diagnostics"
            )
        if not (self.a >= 0.0):
            raise KernelError(f"anomaly exponent a must be >= 0, got {self.a}")
        if not (self.tau >= 0.0):
            raise KernelError(f"tau must be >= 0, got {self.tau}")
        if not (0.0 < self.beta1 <= self.beta2 < math.inf):
            raise KernelError(
                f"need 0 < beta1 <= beta2 < inf, got ({self.beta1}, {self.beta2})"
            )
        # Bounds hypothesis, checked on a grid (the contract for b1 between
        # grid points rests with the caller).
        grid = np.linspace(-1.0, 1.0, 201)
        vals = np.asarray(self.b1(grid), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise KernelError("b1 must be finite on [-1, 1]")
        slack = 1e-9
        if vals.min() < self.beta1 * (1.0 - slack) - slack:
            raise KernelError("b1 drops below beta1 on [-1, 1]")
        if vals.max() > self.beta2 * (1.0 + slack) + slack:
            raise KernelError("b1 exceeds beta2 on [-1, 1]")
        mass = sphere_integral(self.b1, self.dim)
        if abs(mass - 1.0) > MASS_RTOL:
            raise KernelError(
                f"b1 must have unit sphere mass, integral is {mass:.12g}"
            )
        msq = sphere_integral(lambda x: np.asarray(x) ** 2 * self.b1(x), self.dim)
        object.__setattr__(self, "sphere_mass", mass)
        object.__setattr__(self, "angular_msq", msq)

    @property
    def is_isotropic(self) -> bool:
        return self.beta1 == self.beta2

    @classmethod
    def isotropic(cls, e, *, a=0.0, tau=None, dim=3, allow_elastic=False):
        """Config with the constant angular weight; tau defaults to 1 - e."""
        if tau is None:
            tau = 1.0 - e
        c = 1.0 / sphere_area(dim - 1)
        return cls(
            e=e, a=a, tau=tau, b1=isotropic_b1(dim), beta1=c, beta2=c,
            dim=dim, allow_elastic=allow_elastic,
        )

    @classmethod
    def linear_anisotropy(cls, coeff, e, *, a=0.0, tau=None, dim=3,
                          allow_elastic=False):
        """Config with weight (1 + coeff*x) / |S^(d-1)|, |coeff| < 1."""
        if tau is None:
            tau = 1.0 - e
        z = sphere_area(dim - 1)
        return cls(
            e=e, a=a, tau=tau, b1=linear_b1(coeff, dim),
            beta1=(1.0 - abs(coeff)) / z, beta2=(1.0 + abs(coeff)) / z,
            dim=dim, allow_elastic=allow_elastic,
        )


@dataclass(frozen=True)
class CollisionOutcome:
    v_prime: np.ndarray
    vstar_prime: np.ndarray
    delta_energy: float


def collide_pairs(v, v_star, omega, e):
    """Vectorized collision rule for stacked pairs, shape (m, dim).

    Returns (v_prime, vstar_prime, delta_energy).  The impulse is computed
    once per pair and applied with opposite signs, so the momentum sum of
    each pair changes only by the final additions' roundoff.
    """
    u = v - v_star
    g = np.einsum("ij,ij->i", u, omega)
    impulse = (0.5 * (1.0 + e) * g)[:, None] * omega
    return v - impulse, v_star + impulse, -0.5 * (1.0 - e * e) * g * g


def collide(v, v_star, omega, e) -> CollisionOutcome:
    """Collide one pair; validates inputs, then defers to collide_pairs."""
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if v.shape != v_star.shape or v.shape != omega.shape or v.ndim != 1:
        raise InputError("v, v_star, omega must be 1-d arrays of equal length")
    if abs(math.sqrt(float(omega @ omega)) - 1.0) > 1e-12:
        raise InputError("omega must be a unit vector (within 1e-12)")
    if not (0.0 <= e <= 1.0):
        raise InputError(f"restitution must lie in [0, 1], got {e}")
    vp, vsp, de = collide_pairs(v[None, :], v_star[None, :], omega[None, :], e)
    return CollisionOutcome(vp[0], vsp[0], float(de[0]))


def sample_omegas(u_hats, config: KernelConfig, rng) -> np.ndarray:
    """Draw one impact direction per row of u_hats, weighted by b1.

    Rejection sampling from the uniform sphere with acceptance
    b1(u_hat . omega) / beta2.  For the isotropic weight every proposal is
    accepted and no acceptance uniforms are drawn.
    """
    u_hats = np.asarray(u_hats, dtype=float)
    m, d = u_hats.shape
    if d != config.dim:
        raise InputError(f"u_hats have dim {d}, kernel has dim {config.dim}")
    if m and abs(float(np.max(np.abs(
            np.einsum("ij,ij->i", u_hats, u_hats) - 1.0)))) > 1e-9:
        raise InputError("u_hats must be unit vectors (within 1e-9 in norm)")
    out = np.empty((m, d))
    pending = np.arange(m)
    for _ in range(MAX_REJECTION_ROUNDS):
        if pending.size == 0:
            return out
        prop = rng.standard_normal((pending.size, d))
        norms = np.sqrt(np.einsum("ij,ij->i", prop, prop))
        prop /= norms[:, None]
        if config.is_isotropic:
            out[pending] = prop
            pending = pending[:0]
            continue
        x = np.einsum("ij,ij->i", u_hats[pending], prop)
        accept = rng.random(pending.size) * config.beta2 < config.b1(x)
        accept &= np.isfinite(x)
        out[pending[accept]] = prop[accept]
        pending = pending[~accept]
    raise KernelError(
        "angular rejection sampling exhausted its iteration guard; "
        "beta2 is far above the actual range of b1"
    )


def sample_omega(u_hat, config: KernelConfig, rng) -> np.ndarray:
    """Draw a single impact direction for unit vector u_hat."""
    u_hat = np.asarray(u_hat, dtype=float)
    if u_hat.ndim != 1:
        raise InputError("u_hat must be a 1-d unit vector")
    if abs(math.sqrt(float(u_hat @ u_hat)) - 1.0) > 1e-12:
        raise InputError("u_hat must be a unit vector (within 1e-12)")
    return sample_omegas(u_hat[None, :], config, rng)[0]


def dissipation_rate(u_mag: float, config: KernelConfig) -> float:
    """Angular-averaged energy loss factor of a pair at relative speed u_mag.

    D(u) = (1-e^2)/4 * u^2 * integral (u_hat.omega)^2 b1(u_hat.omega) d omega,
    evaluated with the fixed-order quadrature cached on the config.
    """
    u_mag = np.asarray(u_mag)
    if np.any(u_mag < 0):
        raise InputError("relative speed must be >= 0")
    out = 0.25 * (1.0 - config.e * config.e) * u_mag * u_mag * config.angular_msq
    return float(out) if out.ndim == 0 else out


def dissipation_lower_bound(u_mag: float, config: KernelConfig) -> float:
    """Quadratic lower bound beta1 (1-e^2)/4 * c_d * u^2 for D.

    c_d is the sphere integral of (u_hat.omega)^2 with unit weight,
    |S^(d-2)| * integral x^2 (1-x^2)^((d-3)/2) dx = |S^(d-1)| / d.
    """
    c_d = sphere_area(config.dim - 1) / config.dim
    return 0.25 * config.beta1 * (1.0 - config.e * config.e) * c_d * u_mag * u_mag
