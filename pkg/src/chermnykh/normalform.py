"""Symplectic reduction of the quadratic Hamiltonian at L4 to w1*I1 - w2*I2.

Phase-space ordering is X = (x, y, px, py) for the shifted coordinates and
T = (Q1, Q2, P1, P2) for the normal coordinates, with X = J T.  In T the
quadratic Hamiltonian reads (P1^2 - P2^2 + w1^2 Q1^2 - w2^2 Q2^2) / 2.

Eigen-solutions are taken from the ratio chain

    x : y : px : py = (2 n l - G) : (l^2 - n^2 + 2E) : (n l^2 - G l - 2nE + n^3)
                                  : (l^3 + n^2 l + 2E l - nG)

at l = +-i w_j.  Solution j sits at +i w_j and solution j+2 at -i w_j.  Mode 1
is built from solution 1 and mode 2 from solution 4, each as

    column Q = 2 Re(v),    column P = (2 / w) Im(v),

which is the printed J pattern for mode 1 written in real form.  The partner
solutions are fixed by K3 = 2i conj(K1)/w1 and K2 = -2i conj(K4)/w2, so the
two normality conditions read {v1, v3} = {v2, v4} = 1 with {u, v} = u^T S v.
The complex phase of K1 and K4 enforces J11 = J12 = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFrequencies, GaugeUnreachable, NotStable, SignatureMismatch
from .linearize import QuadraticCoeffs, StabilityReport

DEGENERATE_CUTOFF = 1e-8

#: Standard symplectic form for (q1, q2, p1, p2) orderings.
S = np.array(
    [
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ]
)


def hamiltonian_matrix(c: QuadraticCoeffs) -> np.ndarray:
    """Symmetric H with H2 = X^T H X / 2."""
    E, F, G, n = c.E, c.F, c.G, c.n
    return np.array(
        [
            [2 * E, G, 0.0, -n],
            [G, 2 * F, n, 0.0],
            [0.0, n, 1.0, 0.0],
            [-n, 0.0, 0.0, 1.0],
        ]
    )


def characteristic_matrix(c: QuadraticCoeffs, lam: complex) -> np.ndarray:
    """A(lambda) of the linear system A X = 0."""
    E, F, G, n = c.E, c.F, c.G, c.n
    return np.array(
        [
            [2 * E, G, lam, -n],
            [G, 2 * F, n, lam],
            [-lam, n, 1.0, 0.0],
            [-n, -lam, 0.0, 1.0],
        ],
        dtype=complex,
    )


def ratio_chain(c: QuadraticCoeffs, lam: complex) -> np.ndarray:
    E, F, G, n = c.E, c.F, c.G, c.n
    return np.array(
        [
            2 * n * lam - G,
            lam * lam - n * n + 2 * E,
            n * lam * lam - G * lam - 2 * n * E + n ** 3,
            lam ** 3 + n * n * lam + 2 * E * lam - n * G,
        ],
        dtype=complex,
    )


def h2_value(X, c: QuadraticCoeffs):
    """H2 at X = (x, y, px, py); X may be (4,) or (4, k)."""
    X = np.asarray(X, dtype=float)
    H = hamiltonian_matrix(c)
    return 0.5 * np.einsum("i...,ij,j...->...", X, H, X)


def _sform(u, v):
    return u @ S @ v


@dataclass(frozen=True, eq=False)
class EigenSolutionSet:
    omegas: tuple
    lambdas: tuple  # (i w1, i w2, -i w1, -i w2)
    vectors: tuple  # complex 4-vectors for solutions 1..4
    K: tuple  # proportionality constants K1..K4
    normality: tuple  # {v1, v3}, {v2, v4}
    nullspace_residual: float


@dataclass(frozen=True, eq=False)
class NormalFormTransform:
    J: np.ndarray
    omega1: float
    omega2: float
    coeffs: QuadraticCoeffs
    eigen: EigenSolutionSet
    residual_normality: tuple
    residual_canonical: float
    residual_diagonal: float
    column_scales: tuple = field(default=(1.0, 1.0))

    @property
    def omegas(self):
        return self.omega1, self.omega2


@dataclass(frozen=True)
class ActionAngle:
    I1: float
    I2: float
    phi1: float
    phi2: float


def _require_stable(report: StabilityReport):
    if not report.stable:
        raise NotStable(f"L4 is not linearly stable ({report.verdict_detail})")
    if abs(report.omega1 - report.omega2) < DEGENERATE_CUTOFF:
        raise DegenerateFrequencies(f"|w1 - w2| < {DEGENERATE_CUTOFF:g}")


def _gauge_scaled(u, omega, label):
    """Scale u by K = k e^{i theta} so that v_x is positive imaginary and {Re v, Im v} = omega/4."""
    ux = u[0]
    if abs(ux) <= 1e-14 * np.linalg.norm(u):
        raise GaugeUnreachable(f"x-component of {label} vanishes; J11 = J12 = 0 cannot be imposed")
    phase = cmath.exp(1j * (math.pi / 2 - cmath.phase(ux)))
    w = phase * u
    sig = _sform(w.real, w.imag)
    if sig <= 0:
        raise SignatureMismatch(
            f"{label} has the wrong Krein signature for H2 = w1 I1 - w2 I2 ({{Re v, Im v}} = {sig:.3g})"
        )
    K = phase * math.sqrt(omega / (4.0 * sig))
    return K, K * u


def eigen_solution_sets(c: QuadraticCoeffs, report: StabilityReport) -> EigenSolutionSet:
    _require_stable(report)
    w1, w2 = report.omega1, report.omega2
    lams = (1j * w1, 1j * w2, -1j * w1, -1j * w2)
    u = [ratio_chain(c, lam) for lam in lams]
    K1, v1 = _gauge_scaled(u[0], w1, "solution 1")
    K4, v4 = _gauge_scaled(u[3], w2, "solution 4")
    K3 = 2j * np.conj(K1) / w1
    K2 = -2j * np.conj(K4) / w2
    v = (v1, K2 * u[1], K3 * u[2], v4)
    normality = (complex(_sform(v[0], v[2])), complex(_sform(v[1], v[3])))
    null = max(float(np.max(np.abs(characteristic_matrix(c, lam) @ vec))) for lam, vec in zip(lams, v))
    return EigenSolutionSet((w1, w2), lams, v, (K1, K2, K3, K4), normality, null)


def build_transform(c: QuadraticCoeffs, report: StabilityReport) -> NormalFormTransform:
    """Real symplectic J with J11 = J12 = 0 taking H2 to its normal form."""
    eig = eigen_solution_sets(c, report)
    w1, w2 = eig.omegas
    v1, v4 = eig.vectors[0], eig.vectors[3]
    J = np.empty((4, 4))
    J[:, 0] = 2 * v1.real
    J[:, 2] = 2 / w1 * v1.imag
    J[:, 1] = 2 * v4.real
    J[:, 3] = 2 / w2 * v4.imag
    # the gauge is exact by construction; clear roundoff in the phase rotation
    J[0, 0] = J[0, 1] = 0.0

    scales = []
    for q, pcol in ((0, 2), (1, 3)):
        s = _sform(J[:, q], J[:, pcol])
        f = 1.0 / math.sqrt(s)
        J[:, q] *= f
        J[:, pcol] *= f
        scales.append(f)

    canon = float(np.max(np.abs(J.T @ S @ J - S)))
    target = np.diag([w1 * w1, -w2 * w2, 1.0, -1.0])
    diag = float(np.max(np.abs(J.T @ hamiltonian_matrix(c) @ J - target)))
    normality = tuple(abs(z - 1.0) for z in eig.normality)
    return NormalFormTransform(J, w1, w2, c, eig, normality, canon, diag, tuple(scales))


def printed_scalars(c: QuadraticCoeffs, report: StabilityReport):
    """Printed M_j, M_j*, M-bar_j and h_j (complex where radicands are negative).

    Informational only; returned next to h_j recovered from the numerically
    fixed K_j through the printed gauge ratios.
    """
    _require_stable(report)
    eig = eigen_solution_sets(c, report)
    out = {}
    for j, w in ((1, report.omega1), (2, report.omega2)):
        M = cmath.sqrt(w * w - 2 * c.F + c.n ** 2)
        Mstar = cmath.sqrt(w * w - 2 * c.E + c.n ** 2)
        Mbar_radicand = w * w - c.E - 2 - c.n ** 2
        Mbar = math.sqrt(2) * cmath.sqrt(Mbar_radicand)
        h = 1 / (2 * w * M * Mbar * Mstar ** 2)
        Kj = eig.K[j - 1]
        h_numeric = Kj / (w * (2 * c.n * w - 1j * c.G))
        out[j] = {
            "M": M,
            "M_star": Mstar,
            "M_bar": Mbar,
            "M_bar_radicand": Mbar_radicand,
            "h_printed": h,
            "h_from_K": h_numeric,
        }
    return out


def to_action_angle(T, omegas) -> ActionAngle:
    """(Q1, Q2, P1, P2) -> actions and angles with Q = sqrt(2I/w) sin(phi), P = sqrt(2Iw) cos(phi)."""
    Q1, Q2, P1, P2 = T
    acts, angs = [], []
    for Q, P, w in ((Q1, P1, omegas[0]), (Q2, P2, omegas[1])):
        I = (P * P + w * w * Q * Q) / (2 * w)
        phi = math.atan2(math.sqrt(w) * Q, P / math.sqrt(w)) % (2 * math.pi) if I > 0 else 0.0
        acts.append(I)
        angs.append(phi)
    return ActionAngle(acts[0], acts[1], angs[0], angs[1])


def from_action_angle(aa: ActionAngle, omegas):
    out_q, out_p = [], []
    for I, phi, w in ((aa.I1, aa.phi1, omegas[0]), (aa.I2, aa.phi2, omegas[1])):
        out_q.append(math.sqrt(2 * I / w) * math.sin(phi))
        out_p.append(math.sqrt(2 * I * w) * math.cos(phi))
    return out_q[0], out_q[1], out_p[0], out_p[1]


def normal_form_H2(I1, I2, omegas):
    return omegas[0] * I1 - omegas[1] * I2


def linear_state(I1, I2, phi1_0, phi2_0, t, transform: NormalFormTransform):
    """Shifted phase-space state (x, y, px, py) of the linear flow, shape (4,) + shape(t).

    phi1 advances with +w1 and phi2 with -w2.
    """
    t = np.asarray(t, dtype=float)
    w1, w2 = transform.omegas
    phi1 = phi1_0 + w1 * t
    phi2 = phi2_0 - w2 * t
    T = np.stack(
        [
            math.sqrt(2 * I1 / w1) * np.sin(phi1),
            math.sqrt(2 * I2 / w2) * np.sin(phi2),
            math.sqrt(2 * I1 * w1) * np.cos(phi1),
            math.sqrt(2 * I2 * w2) * np.cos(phi2),
        ]
    )
    return np.tensordot(transform.J, T, axes=1)


def linear_orbit(I1, I2, phi1_0, phi2_0, t, transform: NormalFormTransform):
    """Offsets (x(t), y(t)) from L4 along the linear normal-form flow."""
    X = linear_state(I1, I2, phi1_0, phi2_0, t, transform)
    return X[0], X[1]


def shifted_velocity(X, n):
    """Velocities from shifted momenta: xdot = px + n y, ydot = py - n x."""
    x, y, px, py = X
    return px + n * y, py - n * x
