"""Equilibrium points: printed closed forms and series, plus exact refinement.

The closed forms and the epsilon-series are first-order seeds.  Exact points
come from Newton iteration on the analytic gradient and are the ones every
downstream computation uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConvergedToPrimary,
    DegenerateTriangular,
    NegativeRadicand,
    NoConvergence,
    RootNotBracketed,
    SingularityAtPrimary,
)
from .model import potential_gradient, potential_hessian

REFINE_TOL = 1e-12
MAX_NEWTON = 50
_PRIMARY_CAPTURE = 1e-6


@dataclass(frozen=True)
class EquilibriumPoint:
    label: str
    x: float
    y: float
    residual: float
    method: str  # closed_form | series | refined


@dataclass(frozen=True)
class EquilibriumRadii:
    r1: float
    r2: float


@dataclass(frozen=True)
class SeriesTriangular:
    """Epsilon-series position of L4 and the shifted-origin offsets (a, b)."""

    x: float
    y: float
    a: float
    b: float


def residual_at(x, y, p):
    ox, oy = potential_gradient(x, y, p)
    return max(abs(ox), abs(oy))


def _belt_shift(p):
    # (1 - 2 rc) Mb / (rc^2 + T^2)^(3/2); vanishes without a belt
    if p.Mb == 0:
        return 0.0
    return (1.0 - 2.0 * p.rc) * p.Mb / p.belt_factor


def equilibrium_radii(p):
    """Printed first-order distances of L4 from the two primaries."""
    shift = _belt_shift(p)
    oblate = 1.0 - 3.0 * p.mu * p.A2 / (2.0 * (1.0 - p.mu))
    r1 = p.q1 ** (1.0 / 3.0) * (1.0 - p.A2 / 2.0 + shift * oblate / 3.0)
    r2 = 1.0 + p.mu * shift / 3.0
    return EquilibriumRadii(r1, r2)


def distance_loci(p, y):
    """x-coordinates on the r1-locus and r2-locus at height y, as (minus, plus) pairs.

    The printed r2-locus contains a stray r_0, read here as rc.
    """
    shift = _belt_shift(p)
    oblate = 1.0 - 3.0 * p.mu * p.A2 / (2.0 * (1.0 - p.mu))
    rad1 = (p.q1 / p.n ** 2) ** (2.0 / 3.0) * (1.0 + 1.5 * p.A2 - shift * oblate) ** (-2.0 / 3.0) - y * y
    rad2 = (1.0 - p.mu * shift) ** (-2.0 / 3.0) - y * y
    if rad1 < 0 or rad2 < 0:
        raise NegativeRadicand(f"|y| = {abs(y)} lies outside a distance locus")
    s1, s2 = math.sqrt(rad1), math.sqrt(rad2)
    return (-p.mu - s1, -p.mu + s1), (1.0 - p.mu - s2, 1.0 - p.mu + s2)


def triangular_points_closed(p):
    """L4 and L5 from the printed closed-form expressions."""
    q23 = p.q1 ** (2.0 / 3.0)
    R = p.belt_factor
    belt_x = 0.0
    belt_y = 0.0
    if p.Mb:
        belt_x = (1.0 - 2.0 * p.rc) * p.Mb * ((1.0 - 3.0 * p.mu * p.A2 / (1.0 - p.mu)) * q23 - 1.0) / (3.0 * R)
        inner = (q23 - 3.0) - 3.0 * p.mu * p.A2 * (q23 - 3.0) / (2.0 * (1.0 - p.mu))
        belt_y = 4.0 * (2.0 * p.rc - 1.0) * p.Mb * inner / (3.0 * R)
    x = -p.mu + q23 / 2.0 * (1.0 - p.A2) + belt_x
    radicand = 4.0 - q23 + 2.0 * (q23 - 2.0) * p.A2 - belt_y
    if radicand < 0:
        raise DegenerateTriangular(f"closed-form radicand is negative ({radicand:.6g})")
    y = q23 / 2.0 * math.sqrt(radicand)
    l4 = EquilibriumPoint("L4", x, y, residual_at(x, y, p), "closed_form")
    l5 = EquilibriumPoint("L5", x, -y, residual_at(x, -y, p), "closed_form")
    return l4, l5


def triangular_points_series(p):
    """L4 from the printed small-epsilon series together with the printed offsets (a, b).

    The printed y-series carries -5 eps/9 while the printed b carries -2 eps/9;
    both are returned verbatim, so b != y whenever eps != 0.
    """
    mu, eps, A2, Mb = p.mu, p.epsilon, p.A2, p.Mb
    gamma = 1.0 - 2.0 * mu
    cross = mu * A2 * Mb / (1.0 - mu)
    x = (
        gamma / 2.0 - eps / 3.0 - A2 / 2.0 + A2 * eps / 3.0 + 2.0 * Mb * eps / 9.0
        - cross / 2.0 * (1.0 - 2.0 * eps / 3.0)
    )
    tail = -A2 / 3.0 - 2.0 * A2 * eps / 9.0 - 4.0 * Mb / 9.0 - 8.0 * Mb * eps / 27.0 + cross * eps / 9.0
    y = math.sqrt(3.0) / 2.0 * (1.0 - 5.0 * eps / 9.0 + tail)
    a = 0.5 * (
        1.0 - 2.0 * eps / 3.0 - A2 + 2.0 * A2 * eps / 3.0 + 4.0 * Mb * eps / 9.0
        - cross * (1.0 - 2.0 * eps / 3.0)
    )
    b = math.sqrt(3.0) / 2.0 * (1.0 - 2.0 * eps / 9.0 + tail)
    return SeriesTriangular(x, y, a, b)


def _label_for(x, y, p):
    if abs(y) > 1e-10:
        return "L4" if y > 0 else "L5"
    if -p.mu < x < 1.0 - p.mu:
        return "L1"
    return "L2" if x > 1.0 - p.mu else "L3"


def _near_primary(x, y, p):
    (x1, _), (x2, _) = p.primaries
    d1 = math.hypot(x - x1, y)
    d2 = math.hypot(x - x2, y)
    return (p.q1 > 0 and d1 < _PRIMARY_CAPTURE) or d2 < _PRIMARY_CAPTURE


def refine_equilibrium(guess, p, tol=REFINE_TOL, max_iter=MAX_NEWTON, label=None):
    """Damped Newton iteration on grad Omega = 0 starting from ``guess`` = (x, y)."""
    x, y = float(guess[0]), float(guess[1])
    try:
        res = residual_at(x, y, p)
    except SingularityAtPrimary as exc:
        raise ConvergedToPrimary(str(exc)) from exc
    for _ in range(max_iter + 1):
        if res < tol:
            return EquilibriumPoint(label or _label_for(x, y, p), x, y, res, "refined")
        ox, oy = potential_gradient(x, y, p)
        hxx, hxy, hyy = potential_hessian(x, y, p)
        det = hxx * hyy - hxy * hxy
        if det == 0 or not math.isfinite(det):
            break
        dx = -(hyy * ox - hxy * oy) / det
        dy = -(hxx * oy - hxy * ox) / det
        step = 1.0
        while step > 1e-6:
            xn, yn = x + step * dx, y + step * dy
            if _near_primary(xn, yn, p):
                raise ConvergedToPrimary(f"Newton iterate approached a primary at ({xn}, {yn})")
            try:
                rn = residual_at(xn, yn, p)
            except SingularityAtPrimary as exc:
                raise ConvergedToPrimary(str(exc)) from exc
            if rn < res or rn < tol:
                break
            step *= 0.5
        else:
            break
        if rn >= res and rn >= tol:
            break
        x, y, res = xn, yn, rn
    raise NoConvergence(f"Newton did not reach residual {tol:g} (last {res:.3g}) from {tuple(guess)}")


def _reduced_triangular(p):
    """Bracketed 1-D solve for L4 using the distance form of the equilibrium conditions.

    Off the x-axis the conditions separate into q1/r1^3 = 1/r2^3 + 3 A2/(2 r2^5)
    and n^2 = q1/r1^3 + Mb/(r^2 + T^2)^(3/2); the first gives r1 as a function
    of r2, leaving one scalar equation in r2.
    """
    if p.q1 == 0:
        raise DegenerateTriangular("no triangular points when q1 = 0")

    def geometry(r2):
        r1 = (p.q1 / (r2 ** -3 + 1.5 * p.A2 * r2 ** -5)) ** (1.0 / 3.0)
        a = (1.0 + r1 * r1 - r2 * r2) / 2.0
        y2 = r1 * r1 - a * a
        return r1, a - p.mu, y2

    def g(r2):
        r1, x, y2 = geometry(r2)
        val = p.q1 / r1 ** 3 - p.n ** 2
        if p.Mb:
            val += p.Mb / (x * x + y2 + p.T ** 2) ** 1.5
        return val

    grid = np.geomspace(1e-4, 50.0, 4000)
    feasible = [(r2, g(r2)) for r2 in grid if geometry(r2)[2] > 0]
    for (ra, ga), (rb, gb) in zip(feasible, feasible[1:]):
        if ga == 0:
            r2 = ra
            break
        if ga * gb < 0 and rb / ra < 1.01:
            r2 = brentq(g, ra, rb, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            break
    else:
        raise DegenerateTriangular("no triangular equilibrium found on the distance reduction")
    _, x, y2 = geometry(r2)
    return x, math.sqrt(y2)


def triangular_points(p, tol=REFINE_TOL):
    """Exact L4 and L5 (Newton-refined)."""
    if p.q1 == 0:
        raise DegenerateTriangular("no triangular points when q1 = 0")
    seeds = []
    try:
        seeds.append(triangular_points_closed(p)[0])
    except (DegenerateTriangular, SingularityAtPrimary):
        pass
    s = triangular_points_series(p)
    seeds.append((s.x, s.y))
    l4 = None
    for seed in seeds:
        guess = (seed.x, seed.y) if isinstance(seed, EquilibriumPoint) else seed
        if guess[1] <= 0:
            continue
        try:
            cand = refine_equilibrium(guess, p, tol=tol, label="L4")
        except NoConvergence:
            continue
        if cand.y > 1e-8:
            l4 = cand
            break
    if l4 is None:
        l4 = refine_equilibrium(_reduced_triangular(p), p, tol=tol, label="L4")
        if l4.y <= 1e-8:
            raise DegenerateTriangular("refinement collapsed onto the x-axis")
    l5 = EquilibriumPoint("L5", l4.x, -l4.y, residual_at(l4.x, -l4.y, p), "refined")
    return l4, l5


def _omega_x_axis(x, p):
    return potential_gradient(x, 0.0, p)[0]


def _bracket_roots(f, lo, hi, n=4000, cluster=None):
    """Sign changes of f sampled on (lo, hi), clustered geometrically toward ``cluster`` ends."""
    span = hi - lo
    u = np.concatenate([np.linspace(0.0, 1.0, n), np.geomspace(1e-12, 1e-2, n // 4)])
    pts = []
    if cluster in ("lo", "both"):
        pts.append(lo + span * u)
    if cluster in ("hi", "both"):
        pts.append(hi - span * u)
    if cluster is None:
        pts.append(lo + span * u)
    xs = np.unique(np.concatenate(pts))
    xs = xs[(xs > lo) & (xs < hi)]
    vals = []
    for x in xs:
        try:
            vals.append(f(x))
        except SingularityAtPrimary:
            vals.append(np.nan)
    vals = np.asarray(vals)
    brackets = []
    for i in range(len(xs) - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b <= 0 and not (a == 0 and b == 0):
            brackets.append((xs[i], xs[i + 1]))
    return brackets


def _solve_collinear(p, label, lo, hi, cluster, prefer):
    f = lambda x: _omega_x_axis(x, p)  # noqa: E731
    brackets = _bracket_roots(f, lo, hi, cluster=cluster)
    if not brackets:
        raise RootNotBracketed(f"no sign change of Omega_x on ({lo}, {hi}) for {label}")
    a, b = min(brackets, key=lambda ab: abs(0.5 * (ab[0] + ab[1]) - prefer))
    x = brentq(f, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)
    res = abs(f(x))
    if res >= REFINE_TOL:
        pt = refine_equilibrium((x, 0.0), p, label=label)
        return EquilibriumPoint(label, pt.x, 0.0, pt.residual, "refined")
    return EquilibriumPoint(label, x, 0.0, res, "refined")


def collinear_points(p):
    """(L1, L2, L3) on the x-axis.

    If the belt creates extra on-axis roots, the one nearest the smaller
    primary is reported for L1 and L2 and the one nearest x = -1 for L3.
    """
    x1, x2 = -p.mu, 1.0 - p.mu
    far = 10.0 + 10.0 * math.sqrt(1.0 + p.Mb)
    l1 = _solve_collinear(p, "L1", x1, x2, "both", prefer=x2)
    l2 = _solve_collinear(p, "L2", x2, x2 + far, "lo", prefer=x2)
    l3 = _solve_collinear(p, "L3", x1 - far, x1, "hi", prefer=-1.0)
    return l1, l2, l3


def all_equilibria(p):
    """Refined L1..L5 in label order; L4/L5 omitted when they do not exist."""
    points = list(collinear_points(p))
    try:
        points.extend(triangular_points(p))
    except DegenerateTriangular:
        pass
    return points
