"""Round-trip p -> e -> p for a grid of p-values and several calibrators.

    python scripts/round_trip_table.py --out roundtrip.csv
"""

import argparse
import csv
import sys

import numpy as np

from evaltk import Calibrator, round_trip


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="-")
    ap.add_argument("--points", type=int, default=25)
    ap.add_argument("--cals", nargs="+", default=["shafer", "power:0.1", "power:0.5", "power:0.9"])
    args = ap.parse_args()

    grid = np.logspace(-6, 0, args.points)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["calibrator", "p_in", "e", "p_out", "loss_ratio"])
    for spec in args.cals:
        cal = Calibrator.parse(spec)
        for p in grid:
            r = round_trip(float(p), cal)
            w.writerow([spec, f"{r.p_in:.6g}", f"{r.e_mid:.6g}", f"{r.p_out:.6g}", f"{r.p_out / r.p_in:.6g}"])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
