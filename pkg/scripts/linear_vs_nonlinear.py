"""Linear normal-form orbit against full integration, L4, classical mu = 0.01.

For each amplitude delta the short-period mode is synthesized from the
normal form and compared with the nonlinear flow over one short period.
The deviation should scale like delta^2.
"""

import argparse
import math

import numpy as np

from chermnykh import classical
from chermnykh.equilibria import triangular_points
from chermnykh.integrate import integrate_orbit
from chermnykh.linearize import coefficients_exact, stability_analysis
from chermnykh.model import PhaseState
from chermnykh.normalform import build_transform, linear_state, shifted_velocity


def deviation(delta, p, l4, tr, omega, mode):
    ts = np.linspace(0, 2 * math.pi / omega, 400)
    acts = (1.0, 0.0) if mode == 1 else (0.0, 1.0)
    unit = linear_state(*acts, 0.3, 0.3, ts, tr)
    scale = (delta / np.hypot(unit[0], unit[1]).max()) ** 2
    X = linear_state(acts[0] * scale, acts[1] * scale, 0.3, 0.3, ts, tr)
    vx, vy = shifted_velocity(X[:, 0], p.n)
    s0 = PhaseState(l4.x + X[0, 0], l4.y + X[1, 0], vx, vy)
    traj = integrate_orbit(s0, ts[-1], p, rel_tol=1e-13, abs_tol=1e-14, stride=ts[1] - ts[0])
    return float(np.max(np.hypot(traj.states[:, 0] - l4.x - X[0], traj.states[:, 1] - l4.y - X[1])))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.01)
    args = ap.parse_args()
    p = classical(args.mu)
    l4, _ = triangular_points(p)
    c = coefficients_exact(p)
    r = stability_analysis(c)
    tr = build_transform(c, r)
    print("mode,delta,deviation,deviation/delta^2")
    for mode, omega in ((1, r.omega1), (2, r.omega2)):
        for delta in (1e-3, 1e-4, 2.5e-5, 1e-5, 2.5e-6):
            d = deviation(delta, p, l4, tr, omega, mode)
            print(f"{mode},{delta:g},{d:.4e},{d / delta ** 2:.3f}")


if __name__ == "__main__":
    main()
