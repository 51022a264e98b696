#!/usr/bin/env python3
"""Emit the cylinder-overlap figures for both built-in systems."""

import argparse

from sepkit import (
    DrivingSequence,
    example_template,
    param_point,
    render_levels,
    run_construction,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--levels", type=int, default=6)
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()

    seq = DrivingSequence.thue_morse()
    for which in (1, 2):
        tmpl = example_template(which)
        pt = param_point(tmpl, seq)
        run = run_construction(tmpl, seq, args.levels)
        paths = render_levels(
            tmpl.system, pt, run, args.levels, args.out, f"example{which}"
        )
        for path in paths:
            print(path)


if __name__ == "__main__":
    main()
