#!/usr/bin/env python3
"""Convex neighbourhood-type growth: aperiodic parameter vs rational control.

With the aperodically constructed parameter the per-level count of
distinct types keeps growing; pinning the parameter to a rational value
collapses the displacement values onto a fixed finite grid and the
count saturates.  Prints both count sequences side by side.
"""

import argparse
from fractions import Fraction

from sepkit import RationalParam, convex_type_census, example_point, example_system


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--levels", type=int, default=10)
    parser.add_argument("--control", default="1/8", help="rational control value of a")
    args = parser.parse_args()

    sys_ = example_system(1)
    constructed = convex_type_census(sys_, example_point(1), args.levels)
    control = convex_type_census(sys_, RationalParam(Fraction(args.control)), args.levels)
    print(f"{'level':>5} {'thue-morse':>11} {'a=' + args.control:>10}")
    for a, b in zip(constructed.levels, control.levels):
        print(f"{a.level:>5} {a.distinct_count:>11} {b.distinct_count:>10}")


if __name__ == "__main__":
    main()
