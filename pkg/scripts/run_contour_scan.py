#!/usr/bin/env python3
"""Scan the best achievable fidelity over trios {0, phi2, phi3} of equatorial
states and write a plot-ready CSV grid.

The two global minima sit at (120, 240) and (240, 120) degrees, where the
trio is maximally spread and the best fidelity drops to 1/2 + sqrt(2)/4.
"""

import argparse
import sys
import time

from clonebench.fidelity import closed_form_bound
from clonebench.optimize import OptimizationConfig, scan_equator


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=24)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="contour.csv")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args()

    cfg = OptimizationConfig(mode="equal_fidelity_penalty", symmetric=True, seed=args.seed)
    t0 = time.time()
    cells = args.resolution**2

    def progress(i, j, value):
        if args.quiet:
            return
        done = i * args.resolution + j + 1
        if done % args.resolution == 0:
            sys.stderr.write(f"\r{done}/{cells} cells, {time.time() - t0:.0f}s")
            sys.stderr.flush()

    grid = scan_equator(args.resolution, cfg, progress=progress)
    if not args.quiet:
        sys.stderr.write("\n")
    with open(args.out, "w") as fh:
        fh.write(grid.to_csv())
    step = 360.0 / args.resolution
    minima = [(i * step, j * step) for i, j in grid.minimum_cells()]
    vmin = float(grid.fidelity[~grid.degenerate_mask].min())
    print(f"wrote {args.out} ({cells} cells, {time.time() - t0:.0f}s)")
    print(f"minimum cells (deg): {minima}")
    print(f"minimum value: {vmin:.9f}")
    print(f"phase-covariant optimum: {closed_form_bound('phase_1to2'):.9f}")


if __name__ == "__main__":
    main()
