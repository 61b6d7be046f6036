"""False extraction rate on pure-noise features over a grid of FDR levels."""

import argparse
import csv
import sys

from freshx.synth import fer_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--features", type=int, default=250)
    parser.add_argument("--samples", type=int, default=100)
    parser.add_argument("--q", type=float, nargs="+", default=[0.01, 0.05, 0.10, 0.20])
    parser.add_argument("--repetitions", type=int, default=200)
    parser.add_argument("--seed", type=int, default=20160718)
    parser.add_argument("--duplicated", action="store_true", help="every noise column appears twice")
    args = parser.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["q", "fer", "standard_error", "mean_selected", "within_bound"])
    for q in args.q:
        r = fer_experiment(args.features, args.samples, q, args.repetitions, args.seed, args.duplicated)
        writer.writerow([q, r.fer, f"{r.standard_error:.6f}", r.mean_selected, r.fer <= q + 2 * r.standard_error])


if __name__ == "__main__":
    main()
