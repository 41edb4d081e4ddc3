"""Write the de-emphasis curves (rho, gamma*alpha) for several gammas to one CSV."""

import argparse
import csv

from emphlab.estimator import build_table

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--gammas", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7, 0.9])
parser.add_argument("--entries", type=int, default=401)
parser.add_argument("--out", default="fig3_curves.csv")
args = parser.parse_args()

with open(args.out, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["gamma", "rho", "gamma_alpha"])
    for g in args.gammas:
        t = build_table(g, args.entries)
        for r, a in zip(t.rho_grid, t.alpha_values):
            w.writerow([g, f"{r:.8f}", f"{g * a:.8f}"])
print(f"wrote {args.out}")
