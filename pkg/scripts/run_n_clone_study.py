#!/usr/bin/env python3
"""Optimize symmetric 1->n machines on the 120-degree trio and compare the
results with the even/odd closed-form bounds.

For even n the bound is 1/2 + sqrt(n(n+2))/(4n); for odd n it is
1/2 + (n+1)/(4n). The trio is enough to pin the optimum for every n.
"""

import argparse
import json

from clonebench.fidelity import closed_form_bound
from clonebench.optimize import OptimizationConfig, optimize_n


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=6, choices=range(2, 9))
    parser.add_argument("--restarts", type=int, default=160)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="optional JSON output path")
    args = parser.parse_args()

    rows = []
    print(f"{'n':>2} {'parity':>6} {'objective':>14} {'bound':>12} {'gap':>10}")
    for n in range(2, args.n_max + 1):
        cfg = OptimizationConfig(copies=n, restarts=args.restarts, seed=args.seed)
        res = optimize_n(cfg)
        bound = closed_form_bound("phase_1ton", n)
        parity = "even" if n % 2 == 0 else "odd"
        print(
            f"{n:>2} {parity:>6} {res.objective:>14.9f} {bound:>12.9f} "
            f"{res.objective - bound:>+10.1e}"
        )
        rows.append(
            {"n": n, "parity": parity, "objective": res.objective, "bound": bound}
        )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"seed": args.seed, "results": rows}, fh, indent=2)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
