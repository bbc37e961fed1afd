"""Independent reference computations used by the tests.

Nothing here imports the package's numerical code; each oracle is written
from the model definition directly.
"""

import math

import numpy as np


def omega_ref(x, y, mu, q1=1.0, A2=0.0, Mb=0.0, T=0.0, n=1.0):
    """Effective potential summed term by term."""
    r1 = math.sqrt((x + mu) ** 2 + y ** 2)
    r2 = math.sqrt((x + mu - 1.0) ** 2 + y ** 2)
    total = 0.5 * n * n * (x * x + y * y)
    total += (1.0 - mu) * q1 / r1
    total += mu / r2
    total += mu * A2 / (2.0 * r2 ** 3)
    total += Mb / math.sqrt(x * x + y * y + T * T)
    return total


def fd_gradient(f, x, y, h=1e-6):
    return (
        (f(x + h, y) - f(x - h, y)) / (2 * h),
        (f(x, y + h) - f(x, y - h)) / (2 * h),
    )


def fd_hessian(f, x, y, h=1e-4):
    """Second-order central differences."""
    f0 = f(x, y)
    fxx = (f(x + h, y) - 2 * f0 + f(x - h, y)) / h ** 2
    fyy = (f(x, y + h) - 2 * f0 + f(x, y - h)) / h ** 2
    fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    return fxx, fxy, fyy


def bisect(f, lo, hi, tol=1e-14, max_iter=400):
    """Plain bisection; f(lo) and f(hi) must differ in sign."""
    flo = f(lo)
    if flo * f(hi) > 0:
        raise ValueError("no sign change")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def classical_omega_x_axis(x, mu):
    """d Omega/dx on y = 0 for the circular restricted problem."""
    d1, d2 = x + mu, x + mu - 1.0
    return x - (1 - mu) * d1 / abs(d1) ** 3 - mu * d2 / abs(d2) ** 3


def routh_frequencies(mu):
    """(w1, w2) from z^2 - z + 27 mu (1 - mu)/4 = 0 with z = w^2."""
    c = 27.0 * mu * (1.0 - mu) / 4.0
    disc = math.sqrt(1.0 - 4.0 * c)
    return math.sqrt((1 + disc) / 2), math.sqrt((1 - disc) / 2)


def routh_mu():
    return (1.0 - math.sqrt(23.0 / 27.0)) / 2.0


def rk4_orbit(state, t_end, mu, steps):
    """Fixed-step classical RK4 of the circular restricted problem (velocity form)."""

    def f(s):
        x, y, vx, vy = s
        r1 = math.hypot(x + mu, y)
        r2 = math.hypot(x + mu - 1, y)
        ox = x - (1 - mu) * (x + mu) / r1 ** 3 - mu * (x + mu - 1) / r2 ** 3
        oy = y - (1 - mu) * y / r1 ** 3 - mu * y / r2 ** 3
        return np.array([vx, vy, 2 * vy + ox, -2 * vx + oy])

    s = np.array(state, dtype=float)
    h = t_end / steps
    for _ in range(steps):
        k1 = f(s)
        k2 = f(s + h / 2 * k1)
        k3 = f(s + h / 2 * k2)
        k4 = f(s + h * k3)
        s = s + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return s
