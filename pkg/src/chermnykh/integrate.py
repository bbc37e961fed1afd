"""Nonlinear orbit propagation with Jacobi-constant drift monitoring.

Wraps scipy's DOP853 (Dormand-Prince 8(5,3)) stepper so that accepted and
rejected steps can be counted and singularity guards checked after every
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from .errors import ParameterOutOfRange, SingularityAtPrimary, SingularityEncountered, StepUnderflow
from .model import PhaseState, effective_potential, jacobi_constant, potential_gradient

INTEGRATION_GUARD = 1e-6
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12

# DOP853 spends 12 right-hand-side evaluations per step attempt.
_EVALS_PER_ATTEMPT = DOP853.n_stages


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (k, 4): x, y, vx, vy
    jacobi: np.ndarray
    jacobi_drift: float
    accepted: int
    rejected: int
    status: str = "completed"

    def __len__(self):
        return len(self.t)

    @property
    def samples(self):
        return [(float(t), PhaseState(*s)) for t, s in zip(self.t, self.states)]

    @property
    def step_stats(self):
        return {"accepted": self.accepted, "rejected": self.rejected}


def _rhs(p):
    n = p.n

    def f(t, s):
        ox, oy = potential_gradient(s[0], s[1], p)
        return np.array([s[2], s[3], 2.0 * n * s[3] + ox, -2.0 * n * s[2] + oy])

    return f


def _inside_guard(s, p, guard):
    x, y = s[0], s[1]
    if p.q1 > 0 and math.hypot(x + p.mu, y) < guard:
        return True
    if math.hypot(x + p.mu - 1.0, y) < guard:
        return True
    return p.Mb > 0 and p.T == 0 and math.hypot(x, y) < guard


def _jacobi_rows(states, p):
    return np.array([2.0 * effective_potential(s[0], s[1], p) - s[2] ** 2 - s[3] ** 2 for s in states])


def _pack(ts, rows, p, accepted, rejected, status):
    t = np.asarray(ts, dtype=float)
    states = np.asarray(rows, dtype=float).reshape(-1, 4)
    C = _jacobi_rows(states, p)
    drift = float(np.max(np.abs(C - C[0]))) if len(C) else 0.0
    return Trajectory(t, states, C, drift, accepted, rejected, status)


def integrate_orbit(
    state0,
    t_end,
    p,
    rel_tol=DEFAULT_RTOL,
    abs_tol=DEFAULT_ATOL,
    stride=None,
    t0=0.0,
    guard=INTEGRATION_GUARD,
):
    """Propagate ``state0`` from t0 to t_end (either direction).

    With ``stride`` the trajectory is sampled every ``stride`` time units
    (plus the end point) using the stepper's dense output; otherwise every
    accepted step is recorded.
    """
    if t_end == t0:
        raise ParameterOutOfRange("t_end must differ from t0")
    for name, tol in (("rel_tol", rel_tol), ("abs_tol", abs_tol)):
        if not 1e-14 <= tol <= 1e-3:
            raise ParameterOutOfRange(f"{name} must lie in [1e-14, 1e-3], got {tol}")
    if not isinstance(state0, PhaseState):
        state0 = PhaseState(*state0)
    y0 = state0.as_array()
    if _inside_guard(y0, p, guard):
        raise SingularityEncountered("initial state inside a singularity guard", t0)

    direction = 1.0 if t_end > t0 else -1.0
    if stride is not None:
        stride = abs(stride)
        if stride <= 0:
            raise ParameterOutOfRange("stride must be positive")
        k = int(math.floor(abs(t_end - t0) / stride + 1e-9))
        wanted = [t0 + direction * stride * i for i in range(k + 1)]
        if abs(wanted[-1] - t_end) > 1e-9 * stride:
            wanted.append(t_end)
        else:
            wanted[-1] = t_end
        wanted = np.array(wanted)
    ts, rows = [t0], [y0.copy()]
    next_i = 1

    solver = DOP853(_rhs(p), t0, y0, t_end, rtol=rel_tol, atol=abs_tol)
    accepted = rejected = 0
    while solver.status == "running":
        nfev0 = solver.nfev
        try:
            msg = solver.step()
        except SingularityAtPrimary as exc:
            partial = _pack(ts, rows, p, accepted, rejected, "singularity")
            raise SingularityEncountered(str(exc), solver.t, partial) from exc
        attempts = max(1, (solver.nfev - nfev0) // _EVALS_PER_ATTEMPT)
        if solver.status == "failed":
            raise StepUnderflow(f"integration failed at t = {solver.t}: {msg}")
        accepted += 1
        rejected += attempts - 1
        if stride is None:
            ts.append(solver.t)
            rows.append(solver.y.copy())
        else:
            lo, hi = sorted((solver.t_old, solver.t))
            stop = next_i
            while stop < len(wanted) and lo <= wanted[stop] <= hi:
                stop += 1
            if stop > next_i:
                dense = solver.dense_output()
                for tw in wanted[next_i:stop]:
                    ts.append(float(tw))
                    rows.append(solver.y.copy() if tw == solver.t else dense(tw))
                next_i = stop
        if _inside_guard(solver.y, p, guard):
            partial = _pack(ts, rows, p, accepted, rejected, "singularity")
            raise SingularityEncountered(
                f"entered the {guard:g} guard around a singular source", solver.t, partial
            )
    return _pack(ts, rows, p, accepted, rejected, "completed")


def drift_report(traj: Trajectory, p):
    """Jacobi constant re-evaluated at every sample, and its max deviation from the first."""
    C = np.array([jacobi_constant(PhaseState(*s), p) for s in traj.states])
    series = C - C[0]
    return float(np.max(np.abs(series))), series


def mirrored(traj: Trajectory) -> Trajectory:
    """Reflect a trajectory through the x-axis (y -> -y, vy -> -vy)."""
    states = traj.states * np.array([1.0, -1.0, 1.0, -1.0])
    return Trajectory(
        traj.t.copy(), states, traj.jacobi.copy(), traj.jacobi_drift,
        traj.accepted, traj.rejected, traj.status,
    )
