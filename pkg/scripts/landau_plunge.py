"""Concentration-operator study: 2BT law and growth of the plunge region with ln T."""

import argparse
import math

import numpy as np

from losdof import ConcentrationSpec, concentration_eigs, crossing_count, empirical_dof
from losdof.landau import plunge_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--B", type=float, default=1.0)
    ap.add_argument("--T", type=float, nargs="+", default=[10, 20, 40, 80])
    ap.add_argument("--sigma", type=float, default=0.1)
    ap.add_argument("--min-grid", type=int, default=512)
    args = ap.parse_args()

    x, counts, frac = [], [], []
    print(f"{'T':>6} {'2BT':>6} {'N':>6} {'count>0.5':>10} {'count>s':>8} {'crossing':>9}")
    for T in args.T:
        floor = ConcentrationSpec(T, args.B).min_grid_points
        spec = concentration_eigs(ConcentrationSpec(T, args.B, max(args.min_grid, floor)))
        tbw = 2 * args.B * T
        n, c = empirical_dof(spec, args.sigma), crossing_count(spec, args.sigma)
        print(f"{T:6g} {tbw:6g} {len(spec):6d} {empirical_dof(spec, 0.5):10d} {n:8d} {c:9.3f}")
        x.append(math.log(T))
        counts.append(n - tbw)
        frac.append(c - tbw)

    print(f"predicted slope      {plunge_slope(args.sigma):.4f}")
    print(f"integer-count slope  {np.polyfit(x, counts, 1)[0]:.4f}")
    print(f"crossing-count slope {np.polyfit(x, frac, 1)[0]:.4f}")


if __name__ == "__main__":
    main()
