"""Compare measured log-log slopes with the exponent (m+1) - r (m-k-l).

The rescaled pair integral scales like n**((m+1) - r (m-k-l)) for a narrow
delta^(k) against a wide delta^(l) at r = alpha/beta > 1, up to parity
cancellations of the leading constant.
"""

from distmul import Bump, MollifierSpec, ProductQuery, delta, estimate_limit

CASES = [(0, 0, 2), (0, 0, 4), (1, 1, 4), (0, 2, 4), (2, 2, 6)]


def main():
    print(f"{'k':>2} {'l':>2} {'m':>2} {'r':>6}  {'predicted':>9} {'measured':>9}  class")
    for k, l, m in CASES:
        for r in (1.0, 1.25, 2.0, 3.0):
            q = ProductQuery(delta(k), delta(l), MollifierSpec(m), "direct", r, 1.0, Bump())
            v = estimate_limit(q)
            pred = (m + 1) - r * (m - k - l)
            print(f"{k:2d} {l:2d} {m:2d} {r:6.2f}  {pred:9.3f} {v.slope:9.3f}  {v.cls.value}")


if __name__ == "__main__":
    main()
