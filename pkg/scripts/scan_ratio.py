"""Sweep alpha/beta for a delta-derivative product and print the verdict table.

    python3 scripts/scan_ratio.py --k 1 --l 1 --m 4 --lo 2.0 --hi 3.0 --step 0.05
"""

import argparse

from distmul import Bump, MollifierSpec, ProductQuery, delta, scan


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--product", default="sym")
    p.add_argument("--lo", type=float, default=1.1)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--step", type=float, default=0.05)
    args = p.parse_args()

    q = ProductQuery(delta(args.k), delta(args.l), MollifierSpec(args.m), args.product,
                     1.0, 1.0, Bump())
    rep = scan(q, (args.lo, args.hi, args.step))
    print(f"{'r':>10}  {'class':<12} {'slope':>10}  value")
    for pt in rep.points:
        v = pt.verdict
        value = "" if v is None or v.value is None else f"{v.value:.10g}"
        slope = float("nan") if v is None else v.slope
        print(f"{pt.ratio:10.6f}  {pt.cls.value:<12} {slope:10.4f}  {value}")
    print(f"predicted r* = {rep.predicted_ratio}  constant = {rep.predicted_constant}")
    print(f"detected     = {rep.detected_critical}  ordering ok = {rep.ordering_ok}")


if __name__ == "__main__":
    main()
