"""Zero-velocity curve data for mu = 0.025, T = 0.01 across q1.

Writes one CSV per (q1, level) plus a summary of L4 loops, e.g.

    python scripts/zvc_figures.py --out runs/zvc --resolution 512
"""

import argparse
import os

from chermnykh import build_system
from chermnykh.equilibria import triangular_points
from chermnykh.errors import ChermnykhError
from chermnykh.zvc import critical_levels, loops_around, polygon_area, write_contours_csv, zvc_contours

FIXED = (2.9, 3.0, 3.2, 3.5)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/zvc")
    ap.add_argument("--resolution", type=int, default=512)
    ap.add_argument("--a2", type=float, default=0.0)
    ap.add_argument("--mb", type=float, default=0.0)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    box = (-1.5, 1.5, -1.5, 1.5)

    print("q1,level,token,polylines,closed,L4_loop_area")
    for q1 in (1.0, 0.75, 0.5, 0.25, 0.0):
        p = build_system(0.025, q1=q1, A2=args.a2, Mb=args.mb, core_b=0.01, rc_override=0.9999)
        levels = [(f"{c:g}", c) for c in FIXED]
        try:
            crit = critical_levels(p)
            l4, _ = triangular_points(p)
            levels += [(k, v) for k, v in crit.items() if k != "L5"]
            levels += [("L4+0.001", crit["L4"] + 1e-3), ("L4-0.001", crit["L4"] - 1e-3)]
        except ChermnykhError:
            l4 = None  # q1 = 0: no triangular points
        for token, C in levels:
            cs = zvc_contours(C, box, args.resolution, p)
            area = ""
            if l4 is not None:
                loops = loops_around(cs, l4.x, l4.y)
                area = f"{min(abs(polygon_area(pl)) for pl in loops):.6g}" if loops else "0"
            name = f"zvc_q{q1:g}_{token}.csv"
            with open(os.path.join(args.out, name), "w") as fh:
                write_contours_csv(cs, fh, {"mu": 0.025, "q1": q1, "A2": args.a2, "Mb": args.mb, "T": p.T})
            print(f"{q1:g},{C:.10f},{token},{len(cs)},{sum(cs.closed_flags)},{area}")


if __name__ == "__main__":
    main()
