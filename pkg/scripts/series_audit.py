"""Printed series versus exact values for a few parameter sets."""

import math

from chermnykh import build_system
from chermnykh.equilibria import triangular_points, triangular_points_closed, triangular_points_series
from chermnykh.linearize import series_audit

CASES = {
    "classical mu=0.01": dict(mu=0.01),
    "eps=0.01": dict(mu=0.01, q1=0.99),
    "A2=0.01": dict(mu=0.01, A2=0.01),
    "Mb=0.01": dict(mu=0.01, Mb=0.01, core_b=0.01),
    "all 0.01": dict(mu=0.01, q1=0.99, A2=0.01, Mb=0.01, core_b=0.01),
}


def main():
    for name, kw in CASES.items():
        p = build_system(**kw)
        print(f"== {name}")
        audit = series_audit(p)
        for key in ("E", "F", "G", "omega_sq_sum", "omega_sq_product"):
            pr, ex = audit[key]["printed"], audit[key]["exact"]
            print(f"  {key:<17} printed {pr: .10f}  exact {ex: .10f}  diff {pr - ex: .2e}")
        for mode, val in audit["critical_mass"].items():
            print(f"  mu_crit {mode:<20} {val}")
        l4, _ = triangular_points(p)
        s = triangular_points_series(p)
        c, _ = triangular_points_closed(p)
        print(f"  L4 refined ({l4.x:.10f}, {l4.y:.10f})")
        print(f"  L4 closed  offset {math.hypot(c.x - l4.x, c.y - l4.y):.2e}")
        print(f"  L4 series  offset {math.hypot(s.x - l4.x, s.y - l4.y):.2e}")


if __name__ == "__main__":
    main()
