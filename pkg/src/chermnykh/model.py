"""Physical model of the generalized photogravitational Chermnykh problem.

Normalized units: the primaries' masses sum to one, their separation is one
and the gravitational constant is one.  The bigger primary (mass 1 - mu) sits
at (-mu, 0) and radiates; the smaller one (mass mu) sits at (1 - mu, 0) and is
oblate.  A Miyamoto-Nagai belt centred at the origin adds the in-plane
potential -Mb / sqrt(r^2 + T^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NegativeFactor, NonPositiveInput, ParameterOutOfRange, SingularityAtPrimary

#: Guard radius around each singular source for potential evaluation.
SINGULARITY_GUARD = 1e-9

#: Radiation constant in C.G.S. units (cm * g/cm^3).
RADIATION_CONSTANT = 5.6e-5


def mass_reduction_factor(radius, density, chi, clamp=False):
    """q1 = 1 - 5.6e-5 * chi / (radius * density) for a particle in C.G.S. units."""
    if radius <= 0 or density <= 0:
        raise NonPositiveInput(f"radius and density must be positive, got {radius}, {density}")
    if chi < 0:
        raise NonPositiveInput(f"efficiency factor must be non-negative, got {chi}")
    q1 = 1.0 - RADIATION_CONSTANT * chi / (radius * density)
    if q1 < 0:
        if not clamp:
            raise NegativeFactor(f"radiation exceeds gravity (q1 = {q1:.6g})")
        q1 = 0.0
    return min(q1, 1.0)


@dataclass(frozen=True)
class RadiationSource:
    q1: float = 1.0
    particle_radius: float | None = None
    density: float | None = None
    efficiency_chi: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.q1 <= 1.0:
            raise ParameterOutOfRange(f"q1 must lie in [0, 1], got {self.q1}")

    @property
    def epsilon(self):
        return 1.0 - self.q1

    @classmethod
    def from_particle(cls, radius, density, chi, clamp=True):
        q1 = mass_reduction_factor(radius, density, chi, clamp=clamp)
        return cls(q1, radius, density, chi)


@dataclass(frozen=True)
class BeltProfile:
    Mb: float = 0.0
    flatness_a: float = 0.0
    core_b: float = 0.0

    def __post_init__(self):
        if self.Mb < 0:
            raise ParameterOutOfRange(f"belt mass must be non-negative, got {self.Mb}")
        if self.flatness_a < 0 or self.core_b < 0:
            raise ParameterOutOfRange("belt flatness and core parameters must be non-negative")

    @property
    def T(self):
        return self.flatness_a + self.core_b


def belt_potential_planar(r, belt):
    """In-plane belt potential V(r, 0) = -Mb / sqrt(r^2 + T^2)."""
    if belt.Mb == 0:
        return 0.0
    s = r * r + belt.T ** 2
    if s == 0:
        raise SingularityAtPrimary("belt potential is singular at r = T = 0")
    return -belt.Mb / math.sqrt(s)


@dataclass(frozen=True)
class SystemParams:
    mu: float
    radiation: RadiationSource
    A2: float
    belt: BeltProfile
    rc: float
    n: float
    rc_overridden: bool = False

    @property
    def q1(self):
        return self.radiation.q1

    @property
    def epsilon(self):
        return self.radiation.epsilon

    @property
    def Mb(self):
        return self.belt.Mb

    @property
    def T(self):
        return self.belt.T

    @property
    def belt_factor(self):
        """(rc^2 + T^2)^(3/2), the denominator shared by all belt corrections."""
        return (self.rc ** 2 + self.T ** 2) ** 1.5

    @property
    def primaries(self):
        return (-self.mu, 0.0), (1.0 - self.mu, 0.0)

    def with_mu(self, mu):
        """Same model at another mass ratio; rc and n are re-derived unless rc was fixed."""
        return build_system(
            mu,
            self.q1,
            self.A2,
            self.Mb,
            self.belt.flatness_a,
            self.belt.core_b,
            rc_override=self.rc if self.rc_overridden else None,
        )

    def as_dict(self):
        return {
            "mu": self.mu,
            "q1": self.q1,
            "epsilon": self.epsilon,
            "A2": self.A2,
            "Mb": self.Mb,
            "flatness_a": self.belt.flatness_a,
            "core_b": self.belt.core_b,
            "T": self.T,
            "rc": self.rc,
            "rc_overridden": self.rc_overridden,
            "n": self.n,
        }


def derived_rc(mu, q1):
    return math.sqrt((1.0 - mu) * q1 ** (2.0 / 3.0) + mu * mu)


def mean_motion(A2, Mb, rc, T):
    n2 = 1.0 + 1.5 * A2
    if Mb:
        n2 += 2.0 * Mb * rc / (rc * rc + T * T) ** 1.5
    return math.sqrt(n2)


def build_system(mu, q1=1.0, A2=0.0, Mb=0.0, flatness_a=0.0, core_b=0.0, rc_override=None):
    if not 0.0 < mu <= 0.5:
        raise ParameterOutOfRange(f"mu must lie in (0, 1/2], got {mu}")
    if A2 < 0:
        raise ParameterOutOfRange(f"A2 must be non-negative, got {A2}")
    radiation = q1 if isinstance(q1, RadiationSource) else RadiationSource(float(q1))
    belt = BeltProfile(float(Mb), float(flatness_a), float(core_b))
    if rc_override is None:
        rc = derived_rc(mu, radiation.q1)
    else:
        if rc_override < 0:
            raise ParameterOutOfRange(f"rc must be non-negative, got {rc_override}")
        rc = float(rc_override)
    if Mb and rc == 0 and belt.T == 0:
        raise ParameterOutOfRange("belt term is singular for rc = T = 0")
    n = mean_motion(A2, belt.Mb, rc, belt.T)
    return SystemParams(float(mu), radiation, float(A2), belt, rc, n, rc_override is not None)


def classical(mu):
    """Circular restricted three-body problem: no radiation, oblateness or belt."""
    return build_system(mu)


@dataclass(frozen=True)
class PhaseState:
    """Planar rotating-frame state in velocity form."""

    x: float
    y: float
    vx: float = 0.0
    vy: float = 0.0

    def momenta(self, n):
        return self.vx - n * self.y, self.vy + n * self.x

    @classmethod
    def from_momenta(cls, x, y, px, py, n):
        return cls(x, y, px + n * y, py - n * x)

    def mirrored(self):
        return replace(self, y=-self.y, vy=-self.vy)

    def as_array(self):
        return np.array([self.x, self.y, self.vx, self.vy])


def _distances(x, y, p):
    dx1 = x + p.mu
    dx2 = x + p.mu - 1.0
    r1 = np.sqrt(dx1 * dx1 + y * y)
    r2 = np.sqrt(dx2 * dx2 + y * y)
    return dx1, dx2, r1, r2


def _check_guard(r1, r2, s_belt, p, guard=SINGULARITY_GUARD):
    if p.q1 > 0 and r1 < guard:
        raise SingularityAtPrimary(f"point within {guard:g} of the bigger primary")
    if r2 < guard:
        raise SingularityAtPrimary(f"point within {guard:g} of the smaller primary")
    if p.Mb > 0 and s_belt < guard * guard:
        raise SingularityAtPrimary("point at the belt singularity (T = 0, r = 0)")


def omega_grid(x, y, p):
    """Vectorized effective potential; NaN where a singularity guard is violated."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _, _, r1, r2 = _distances(x, y, p)
    s = x * x + y * y + p.T ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        om = 0.5 * p.n ** 2 * (x * x + y * y) + p.mu / r2 + p.mu * p.A2 / (2.0 * r2 ** 3)
        if p.q1 > 0:
            om = om + (1.0 - p.mu) * p.q1 / r1
        if p.Mb > 0:
            om = om + p.Mb / np.sqrt(s)
    bad = r2 < SINGULARITY_GUARD
    if p.q1 > 0:
        bad |= r1 < SINGULARITY_GUARD
    if p.Mb > 0:
        bad |= s < SINGULARITY_GUARD ** 2
    return np.where(bad, np.nan, om)


def effective_potential(x, y, p):
    """Omega = n^2 r^2/2 + (1-mu) q1/r1 + mu/r2 + mu A2/(2 r2^3) + Mb/sqrt(r^2+T^2)."""
    _, _, r1, r2 = _distances(x, y, p)
    s = x * x + y * y + p.T ** 2
    _check_guard(r1, r2, s, p)
    om = 0.5 * p.n ** 2 * (x * x + y * y) + p.mu / r2 + p.mu * p.A2 / (2.0 * r2 ** 3)
    if p.q1 > 0:
        om += (1.0 - p.mu) * p.q1 / r1
    if p.Mb > 0:
        om += p.Mb / math.sqrt(s)
    return float(om)


def potential_gradient(x, y, p):
    dx1, dx2, r1, r2 = _distances(x, y, p)
    s = x * x + y * y + p.T ** 2
    _check_guard(r1, r2, s, p)
    n2 = p.n ** 2
    k1 = (1.0 - p.mu) * p.q1 / r1 ** 3
    k2 = p.mu / r2 ** 3 + 1.5 * p.mu * p.A2 / r2 ** 5
    kb = p.Mb / s ** 1.5 if p.Mb > 0 else 0.0
    ox = n2 * x - k1 * dx1 - k2 * dx2 - kb * x
    oy = n2 * y - k1 * y - k2 * y - kb * y
    return float(ox), float(oy)


def _radial_hessian(k, power, dx, dy, rho2):
    # Hessian of k * rho^-power with rho^2 = dx^2 + dy^2 (+ const).
    a = -power * k * rho2 ** (-(power + 2) / 2.0)
    b = power * (power + 2) * k * rho2 ** (-(power + 4) / 2.0)
    return a + b * dx * dx, b * dx * dy, a + b * dy * dy


def potential_hessian(x, y, p):
    """Analytic second derivatives (Omega_xx, Omega_xy, Omega_yy)."""
    dx1, dx2, r1, r2 = _distances(x, y, p)
    s = x * x + y * y + p.T ** 2
    _check_guard(r1, r2, s, p)
    n2 = p.n ** 2
    hxx, hxy, hyy = n2, 0.0, n2
    terms = [
        (p.mu, 1, dx2, y, r2 * r2),
        (0.5 * p.mu * p.A2, 3, dx2, y, r2 * r2),
    ]
    if p.q1 > 0:
        terms.append(((1.0 - p.mu) * p.q1, 1, dx1, y, r1 * r1))
    if p.Mb > 0:
        terms.append((p.Mb, 1, x, y, s))
    for k, power, dx, dy, rho2 in terms:
        if k == 0:
            continue
        axx, axy, ayy = _radial_hessian(k, power, dx, dy, rho2)
        hxx += axx
        hxy += axy
        hyy += ayy
    return float(hxx), float(hxy), float(hyy)


def jacobi_constant(state, p):
    """C = 2 Omega - vx^2 - vy^2."""
    return 2.0 * effective_potential(state.x, state.y, p) - state.vx ** 2 - state.vy ** 2


def eom_rhs(state, p):
    """(xdot, ydot, xddot, yddot) of the rotating-frame equations of motion."""
    ox, oy = potential_gradient(state.x, state.y, p)
    return (
        state.vx,
        state.vy,
        2.0 * p.n * state.vy + ox,
        -2.0 * p.n * state.vx + oy,
    )
