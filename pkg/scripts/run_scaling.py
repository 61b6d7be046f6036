"""Wall time against series length, sample count or column count, with per-doubling ratios."""

import argparse
import csv
import sys

from freshx.synth import scaling_experiment

GRIDS = {
    "length": [1000, 2000, 4000, 8000],
    "samples": [250, 500, 1000, 2000],
    "features": [500, 1000, 2000, 4000],
}
# fixed size of the axis not being swept
FIXED = {"length": {"samples": 200}, "samples": {"length": 1000}, "features": {"samples": 1000}}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--axis", choices=sorted(GRIDS), nargs="+", default=sorted(GRIDS))
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["axis", "value", "wall_seconds", "ratio_to_previous"])
    for axis in args.axis:
        rows = scaling_experiment(axis, GRIDS[axis], jobs=args.jobs, repeat=args.repeat, seed=args.seed, **FIXED[axis])
        previous = None
        for value, seconds in rows:
            ratio = "" if previous is None else f"{seconds / previous:.3f}"
            writer.writerow([axis, value, f"{seconds:.4f}", ratio])
            previous = seconds


if __name__ == "__main__":
    main()
