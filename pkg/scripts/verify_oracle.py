"""Brute-force grid search against the first-order solver on tiny horizons."""

import argparse

from sirs_activity.verify import run_oracle_suite

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizons", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--grid-step", type=float, default=0.01)
    args = p.parse_args()
    results = run_oracle_suite(args.horizons, args.grid_step)
    for line, ok in results:
        print(("PASS " if ok else "FAIL ") + line)
    print(f"{sum(ok for _, ok in results)}/{len(results)} checks pass")
