"""Critical mass over A2 in [0, 1], Mb in [0, 2] for q1 in {1, 0.75, 0.5, 0.25}.

rc is held at 0.9999 and T = 0.01 as in the published surfaces.  Output is
one CSV with columns q1, A2, Mb, mu_crit.
"""

import argparse
import os

import numpy as np

from chermnykh.linearize import BeltSetup, critical_mass_surface


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/mu_crit_surface.csv")
    ap.add_argument("--n", type=int, default=21, help="nodes per axis")
    ap.add_argument("--workers", type=int, default=os.cpu_count())
    args = ap.parse_args()

    rows = critical_mass_surface(
        (1.0, 0.75, 0.5, 0.25),
        np.linspace(0, 1, args.n),
        np.linspace(0, 2, args.n),
        BeltSetup(0.0, 0.01, 0.9999),
        workers=args.workers,
    )
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write("q1,A2,Mb,mu_crit,error\n")
        for r in rows:
            mc = "" if r.mu_crit is None else repr(r.mu_crit)
            fh.write(f"{r.q1!r},{r.A2!r},{r.Mb!r},{mc},{r.error.replace(',', ';')}\n")
    for q1 in (1.0, 0.75, 0.5, 0.25):
        vals = [r.mu_crit for r in rows if r.q1 == q1 and r.mu_crit is not None]
        print(f"q1={q1:<5} mu_crit in [{min(vals):.6f}, {max(vals):.6f}] over {len(vals)} nodes")


if __name__ == "__main__":
    main()
