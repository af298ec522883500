#!/usr/bin/env python3
"""Time-averaged combining efficiency versus input intensity for several D."""

import argparse
import csv
from pathlib import Path

from beamcomb.engine import SimConfig, run_sweep
from beamcomb.physics import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--D", type=float, nargs="+", default=[0.02, 0.05, 0.1])
    ap.add_argument("--I0", type=float, nargs="+", default=[0.5, 1, 2, 3, 5, 10, 15, 20])
    ap.add_argument("--slots", type=int, default=50_000)
    ap.add_argument("--burn-in", type=int, default=1000)
    ap.add_argument("--replicates", type=int, default=3)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--out", default="out/fig4")
    args = ap.parse_args()

    base = SimConfig(SystemParams(10.0, args.D[0], 0.01), n_slots=args.slots, seed=args.seed,
                     burn_in_slots=args.burn_in)
    res = run_sweep(base, args.D, args.I0, args.replicates, jobs=args.jobs)
    eta, se = res.mean_eta()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "efficiency.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["D", "I0", "total_intensity", "eta", "std_error"])
        for a, D in enumerate(args.D):
            for b, I0 in enumerate(args.I0):
                w.writerow([D, I0, 2 * I0, f"{eta[a, b]:.6f}", f"{se[a, b]:.6f}"])
    print("2*I0  " + "  ".join(f"D={D:<6g}" for D in args.D))
    for b, I0 in enumerate(args.I0):
        print(f"{2 * I0:<5g} " + "  ".join(f"{eta[a, b]:.4f}  " for a in range(len(args.D))))


if __name__ == "__main__":
    main()
