"""Quadratic Hamiltonian at L4, the characteristic quartic and critical mass ratios.

Exact coefficients come from the analytic Hessian at the refined L4.  The
printed series for E, F, G, for the frequency relations and for the critical
mass are evaluated verbatim so they can be audited against the exact values.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

from .equilibria import REFINE_TOL, triangular_points
from .errors import ChermnykhError, NoSignChange
from .model import build_system, effective_potential, potential_gradient, potential_hessian

#: Routh critical mass ratio as printed.
MU_C0 = 0.0385209
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class QuadraticCoeffs:
    E: float
    F: float
    G: float
    n: float
    source: str  # exact | series


@dataclass(frozen=True)
class StabilityReport:
    lambda_squared: tuple
    D: float
    omega1: float | None
    omega2: float | None
    stable: bool
    verdict_detail: str
    vieta_sum: float
    vieta_product: float


@dataclass(frozen=True)
class LagrangianTerms:
    """Taylor terms of the Lagrangian about (a - mu, b).

    ``L0``, ``L1`` and ``L2`` are exact (from the analytic potential);
    ``L0_printed`` and ``L1_printed`` evaluate the printed expressions.
    ``L2`` holds the coefficients of x^2, xy, y^2 in the position part
    n^2 (x^2 + y^2)/2 - E x^2 - F y^2 - G xy.
    """

    a: float
    b: float
    L0: float
    L1: tuple
    L2: dict
    L0_printed: float
    L1_printed: tuple


@dataclass(frozen=True)
class FrequencyAudit:
    sum_printed: float
    product_printed: float
    sum_exact: float
    product_exact: float


def coefficients_at(x, y, p):
    hxx, hxy, hyy = potential_hessian(x, y, p)
    n2 = p.n ** 2
    return QuadraticCoeffs(n2 / 2.0 - hxx / 2.0, n2 / 2.0 - hyy / 2.0, -hxy, p.n, "exact")


def coefficients_exact(p, tol=REFINE_TOL):
    l4, _ = triangular_points(p, tol=tol)
    return coefficients_at(l4.x, l4.y, p)


def coefficients_series(p):
    """E, F, G from the printed bracketed series."""
    mu, eps, A2, Mb, rc = p.mu, p.epsilon, p.A2, p.Mb, p.rc
    R = p.belt_factor
    w = (2.0 * rc - 1.0) * Mb / R if Mb else 0.0

    E = (
        2.0 - 324.0 * (2.0 - 25.0 * mu) * Mb - w * (2.0 + 15.0 * (2.0 - 7.0 * mu) * Mb)
        + 2.0 * eps * (
            -54.0 - 270.0 * mu + 135.0 * (10.0 - 81.0 * mu) * Mb
            - w * (146.0 - 33.0 * mu + 15.0 * (118.0 - 205.0 * mu) * Mb)
        )
        + 6.0 * A2 * (
            162.0 - 432.0 * mu + 135.0 * (2.0 + 39.0 * mu) * Mb
            + w * (146.0 - 240.0 * mu - 15.0 * (10.0 - 259.0 * mu) * Mb)
        )
        + eps * A2 * (
            144.0 - 5022.0 * mu - 270.0 * (4.0 - 395.0 * mu) * Mb
            - w * (458.0 + 540.0 * mu + 15.0 * (1926.0 - 7399.0 * mu) * Mb)
        )
    ) / 1728.0

    F = -(
        360.0 + 108.0 * (22.0 + 85.0 * mu) * Mb + w * (2.0 + 5.0 * (6.0 + 35.0 * mu) * Mb)
        + 2.0 * eps * (
            54.0 - 18.0 * mu + 45.0 * (62.0 + 309.0 * mu) * Mb
            - w * (10.0 + 39.0 * mu + 5.0 * (202.0 + 1565.0 * mu) * Mb)
        )
        + 6.0 * A2 * (
            126.0 + 45.0 * (26.0 + 99.0 * mu) * Mb
            + w * (46.0 + 5.0 * (142.0 + 791.0 * mu) * Mb)
        )
        + eps * A2 * (
            576.0 - 18.0 * mu + 90.0 * (228.0 + 1147.0 * mu) * Mb
            + w * (522.0 + 526.0 * mu + 5.0 * (3834.0 + 27923.0 * mu) * Mb)
        )
    ) / 576.0

    G = -(
        648.0 - 1296.0 * mu + 1620.0 * (2.0 + 3.0 * mu) * Mb
        + 12.0 * w * (22.0 - 44.0 * mu + 5.0 * (34.0 + 39.0 * mu) * Mb)
        + 2.0 * eps * (
            198.0 - 666.0 * mu + 45.0 * (94.0 + 201.0 * mu) * Mb
            + 2.0 * w * (190.0 - 423.0 * mu + 135.0 * (18.0 + 65.0 * mu) * Mb)
        )
        + 6.0 * A2 * (
            126.0 - 468.0 * mu + 45.0 * (26.0 + 15.0 * mu) * Mb
            + w * (96.0 - 260.0 * mu + 15.0 * (66.0 + 133.0 * mu) * Mb)
        )
        + eps * A2 * (
            1368.0 - 4806.0 * mu + 90.0 * (280.0 + 429.0 * mu) * Mb
            + w * (2106.0 - 655.0 * mu + 35.0 * (982.0 + 3025.0 * mu) * Mb)
        )
    ) / (288.0 * SQRT3)

    return QuadraticCoeffs(E, F, G, p.n, "series")


def lagrangian_terms(p, offsets=None, tol=REFINE_TOL):
    """Constant, linear and quadratic Taylor terms of the Lagrangian about L4.

    ``offsets`` = (a, b) defaults to the refined L4, a = x + mu, b = y.
    """
    if offsets is None:
        l4, _ = triangular_points(p, tol=tol)
        a, b = l4.x + p.mu, l4.y
    else:
        a, b = offsets
    x0, y0 = a - p.mu, b
    L0 = effective_potential(x0, y0, p)
    L1 = potential_gradient(x0, y0, p)
    hxx, hxy, hyy = potential_hessian(x0, y0, p)
    L2 = {"xx": hxx / 2.0, "xy": hxy, "yy": hyy / 2.0, "n": p.n}

    mu, q1, A2, Mb, T, n2 = p.mu, p.q1, p.A2, p.Mb, p.T, p.n ** 2
    rho1 = a * a + b * b
    rho2 = (a - 1.0) ** 2 + b * b
    rb = (a - mu) ** 2 + b * b + T * T
    L0_printed = (
        ((a - mu) ** 2 + b * b) * n2
        + (1.0 - mu) * q1 / math.sqrt(rho1)
        + mu / math.sqrt(rho2) * (1.0 + A2 / (2.0 * (a - 1.0) ** 2 + b * b))
        + Mb / rb ** 1.5
    )
    obl = 1.0 + 3.0 * A2 / (2.0 * (a - 1.0) ** 2 + b * b)
    cx = (
        2.0 * n2 * (a - mu) - a * (1.0 - mu) * q1 / rho1 ** 1.5
        - 3.0 * (a - mu) * Mb / rb ** 2.5 - (a - 1.0) * mu / rho2 ** 1.5 * obl
    )
    cy = 2.0 * b * n2 - b * (1.0 - mu) * q1 / rho1 ** 1.5 - 3.0 * b * Mb / rb ** 2.5 - b * mu / rho2 ** 1.5 * obl
    return LagrangianTerms(a, b, L0, L1, L2, L0_printed, (cx, cy))


def quartic_coefficients(c):
    """(b, c) of z^2 + b z + c = 0 with z = lambda^2."""
    s = c.E + c.F
    n2 = c.n ** 2
    return 2.0 * (s + n2), 4.0 * c.E * c.F - c.G ** 2 + n2 * n2 - 2.0 * n2 * s


def stability_analysis(c):
    """Roots of the characteristic quartic and the linear-stability verdict.

    Stable requires D > 0 and both lambda^2 roots negative.  omega1 > omega2.
    """
    b, q = quartic_coefficients(c)
    D = b * b - 4.0 * q
    if D >= 0:
        sq = math.sqrt(D)
        t = -0.5 * (b + math.copysign(sq, b))
        z1 = t
        z2 = q / t if t != 0 else -b - t
        roots = (z1, z2)
    else:
        sq = cmath.sqrt(D)
        roots = ((-b + sq) / 2.0, (-b - sq) / 2.0)
    if D <= 0:
        detail = "D <= 0: complex lambda^2 roots" if D < 0 else "D = 0: repeated lambda^2 root"
        return StabilityReport(roots, D, None, None, False, detail, -b, q)
    if max(roots) >= 0:
        return StabilityReport(roots, D, None, None, False, "D > 0 but a lambda^2 root is non-negative", -b, q)
    w = sorted((math.sqrt(-z) for z in roots), reverse=True)
    zs = tuple(sorted(roots))
    return StabilityReport(zs, D, w[0], w[1], True, "stable", -b, q)


def is_stable(p, tol=REFINE_TOL):
    return stability_analysis(coefficients_exact(p, tol=tol)).stable


def frequency_relations_series(p, tol=REFINE_TOL):
    """Printed sum and product of the squared frequencies next to the exact Vieta values."""
    mu, eps, A2, Mb, rc = p.mu, p.epsilon, p.A2, p.Mb, p.rc
    R = p.belt_factor
    s = (
        27.0 * ((1.0 + mu) * eps - 2.0)
        + 9.0 * (-18.0 + 36.0 * mu + (22.0 + 69.0 * mu))
        + 81.0 * Mb / 2.0 * (12.0 + 30.0 * eps + 30.0 * mu + 95.0 * mu * eps)
        + 135.0 * Mb * A2 * (18.0 + 58.0 * eps + 45.0 * mu + 188.0 * mu * eps)
        + Mb * (
            180.0 + 2.0 * (2.0 * rc - 1.0) * (44.0 + 21.0) * mu * eps
            + 72.0 * rc + 4.0 * rc * A2 * (78.0 + 180.0 * mu + (253.0 + 873.0 * mu) * eps)
        ) / (2.0 * R)
    ) / 54.0

    head = -(
        108.0 * (eps + 3.0 * Mb * (2.0 + 7.0 * eps))
        + 18.0 * (31.0 * eps + Mb * (144.0 + 647.0 * eps)) * A2
        + Mb * (
            4.0 * (36.0 - 47.0 * eps + 4.0 * rc * (9.0 + 28.0 * eps))
            + 3.0 * (74.0 - 297.0 * eps + 4.0 * rc * (44.0 + 175.0 * eps)) * A2
        ) / R
    ) / 72.0
    lin = mu * (
        27.0 / 4.0 + 99.0 * eps / 8.0 + 117.0 / 4.0 + 73.0 * A2 * eps
        + Mb * (
            45.0 / 4.0 + 81.0 * A2 + 273.0 * eps / 8.0 + 2357.0 * A2 * eps / 8.0
            + (
                396.0 * (2.0 * rc - 1.0) + 4.0 * (772.0 * rc - 395.0) * eps
                + 12.0 * (326.0 * rc - 181.0) * A2 + (18452.0 * rc - 9667.0) * A2 * eps
            ) / (72.0 * R)
        )
    )
    quad = mu * mu * (
        -27.0 / 4.0 + 111.0 * eps / 8.0 + 117.0 / 4.0 + 161.0 * A2 * eps / 2.0
        + Mb * (
            405.0 / 4.0 + 495.0 * A2 / 2.0 + 4185.0 * eps / 16.0 + 25275.0 * A2 * eps / 16.0
            + (2.0 * rc - 1.0) * (198.0 - 838.0 * eps - 1014.0 * A2 - 5117.0 * A2 * eps) / (36.0 * R)
        )
    )
    b, q = quartic_coefficients(coefficients_exact(p, tol=tol))
    # omega1^2 + omega2^2 = b and omega1^2 omega2^2 = q for z^2 + b z + q
    return FrequencyAudit(s, head + lin + quad, b, q)


def critical_mass_series(p, mode="corrected"):
    """Right-hand side of the printed critical-mass inequality.

    ``as_printed`` subtracts the whole trailing bracket; ``corrected`` reads
    its standalone 0.0627796 - 0.112691 eps part as multiplied by A2.
    """
    eps, A2, Mb, rc = p.epsilon, p.A2, p.Mb, p.rc
    R = p.belt_factor
    belt = Mb * (
        0.571136 + 1.73097 * eps
        + (0.219964 - 0.398363 * eps + rc * (0.202129 + 0.114305 * eps)) / R
    )
    standalone = 0.0627796 - 0.112691 * eps
    oblate_belt = Mb * A2 * (
        0.281354 - 1.53665 * eps
        + (0.654936 - 0.669428 * eps + rc * (0.195486 + 0.350878 * eps)) / R
    )
    base = MU_C0 + 0.125885 * eps + belt
    if mode == "as_printed":
        return base - (standalone + oblate_belt)
    if mode == "corrected":
        return base - (A2 * standalone + oblate_belt)
    raise ValueError(f"unknown mode {mode!r}")


def routh_critical_mass():
    return 0.5 * (1.0 - math.sqrt(23.0 / 27.0))


def critical_mass_numeric(p, lo=1e-6, hi=0.5, tol=1e-9, refine_tol=REFINE_TOL):
    """Stability boundary in mu by bisection, holding every other parameter of ``p`` fixed."""

    def stable(mu):
        try:
            return is_stable(p.with_mu(mu), tol=refine_tol)
        except ChermnykhError:
            return False

    s_lo, s_hi = stable(lo), stable(hi)
    if s_lo == s_hi:
        state = "stable" if s_lo else "unstable"
        raise NoSignChange(f"L4 is {state} at both ends of [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable(mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def series_audit(p, tol=REFINE_TOL):
    """Printed-series values next to their exact counterparts, as a plain dict."""
    exact = coefficients_exact(p, tol=tol)
    series = coefficients_series(p)
    freq = frequency_relations_series(p, tol=tol)
    try:
        mu_num = critical_mass_numeric(p, refine_tol=tol)
    except ChermnykhError as exc:
        mu_num = repr(exc)
    return {
        "E": {"printed": series.E, "exact": exact.E},
        "F": {"printed": series.F, "exact": exact.F},
        "G": {"printed": series.G, "exact": exact.G},
        "omega_sq_sum": {"printed": freq.sum_printed, "exact": freq.sum_exact},
        "omega_sq_product": {"printed": freq.product_printed, "exact": freq.product_exact},
        "critical_mass": {
            "printed_as_printed": critical_mass_series(p, "as_printed"),
            "printed_corrected": critical_mass_series(p, "corrected"),
            "numeric": mu_num,
        },
    }


@dataclass(frozen=True)
class AtlasRow:
    index: tuple
    mu: float
    A2: float
    Mb: float
    q1: float
    E: float | None = None
    F: float | None = None
    G: float | None = None
    D: float | None = None
    omega1: float | None = None
    omega2: float | None = None
    verdict: str = "error"
    error: str = ""


@dataclass(frozen=True)
class SurfaceRow:
    index: tuple
    q1: float
    A2: float
    Mb: float
    mu_crit: float | None = None
    error: str = ""


@dataclass(frozen=True)
class BeltSetup:
    """Parameters held fixed across a sweep."""

    flatness_a: float = 0.0
    core_b: float = 0.0
    rc_override: float | None = None


def _atlas_node(args):
    index, (mu, A2, Mb, q1), setup = args
    try:
        p = build_system(mu, q1, A2, Mb, setup.flatness_a, setup.core_b, setup.rc_override)
        c = coefficients_exact(p)
        r = stability_analysis(c)
    except ChermnykhError as exc:
        return AtlasRow(index, mu, A2, Mb, q1, error=f"{type(exc).__name__}: {exc}")
    return AtlasRow(
        index, mu, A2, Mb, q1, c.E, c.F, c.G, r.D, r.omega1, r.omega2,
        "stable" if r.stable else "unstable",
    )


def _surface_node(args):
    index, (q1, A2, Mb), setup, tol = args
    try:
        p = build_system(0.01, q1, A2, Mb, setup.flatness_a, setup.core_b, setup.rc_override)
        return SurfaceRow(index, q1, A2, Mb, critical_mass_numeric(p, tol=tol))
    except ChermnykhError as exc:
        return SurfaceRow(index, q1, A2, Mb, error=f"{type(exc).__name__}: {exc}")


def _run(fn, jobs, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def stability_atlas(mus, A2s, Mbs, q1s, setup=BeltSetup(), workers=1):
    """Stability verdict on every node of the (mu, A2, Mb, q1) grid, in lexicographic index order."""
    axes = [list(mus), list(A2s), list(Mbs), list(q1s)]
    jobs = [
        (idx, tuple(axes[k][i] for k, i in enumerate(idx)), setup)
        for idx in product(*(range(len(a)) for a in axes))
    ]
    return _run(_atlas_node, jobs, workers)


def critical_mass_surface(q1s, A2s, Mbs, setup=BeltSetup(), workers=1, tol=1e-9):
    """mu_crit on the (q1, A2, Mb) grid, in lexicographic index order."""
    axes = [list(q1s), list(A2s), list(Mbs)]
    jobs = [
        (idx, tuple(axes[k][i] for k, i in enumerate(idx)), setup, tol)
        for idx in product(*(range(len(a)) for a in axes))
    ]
    return _run(_surface_node, jobs, workers)
