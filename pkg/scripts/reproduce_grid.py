"""Run every desk-scale check in one go and write a JSON summary.

    python3 scripts/reproduce_grid.py --pmax 100 --rmax 4 --out results.json
"""

import argparse
import json
import time

from powerpartible.exact import odd_primes_below
from powerpartible.harness import (
    GridSpec,
    two_path_report,
    verify_closed_form_symbolic,
    verify_divisibility,
    verify_lemma32,
    verify_theorem1,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pmax", type=int, default=100)
    ap.add_argument("--rmax", type=int, default=4)
    ap.add_argument("--zmin", type=int, default=-10)
    ap.add_argument("--zmax", type=int, default=10)
    ap.add_argument("--nmax", type=int, default=200)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    grid = GridSpec.desk(args.pmax, args.rmax, args.zmin, args.zmax)
    zs = range(args.zmin, args.zmax + 1)
    runs = {
        "congruences": lambda: verify_theorem1(grid, jobs=args.jobs),
        "two_path": lambda: two_path_report(grid, jobs=args.jobs),
        "delannoy": lambda: verify_lemma32(odd_primes_below(args.pmax), z_values=zs),
        "closed_form_numeric": lambda: verify_divisibility(args.nmax, 4, z_values=zs),
        "closed_form_symbolic": lambda: verify_closed_form_symbolic(20, 4),
    }
    results = {}
    all_ok = True
    for name, run in runs.items():
        t0 = time.perf_counter()
        report = run()
        s = report.summary()
        s["seconds"] = round(time.perf_counter() - t0, 2)
        results[name] = s
        all_ok &= report.ok
        print(f"{name:22s} {s['passed']:>7d}/{s['checked']:<7d} skipped {s['skipped']:<4d} {s['seconds']}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(results, fh, indent=2)
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
