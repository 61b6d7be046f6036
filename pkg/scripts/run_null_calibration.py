"""Distance of null p-value distributions from uniform, per test and target design."""

import argparse

import numpy as np
from scipy import stats

from freshx.significance import dispatch_test


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=100)
    parser.add_argument("--sims", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=123)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    m = args.samples
    balanced = np.repeat([0.0, 1.0], m // 2)
    p = {"kendall": [], "ks_bernoulli_target": [], "ks_balanced_target": [], "fisher": []}
    for _ in range(args.sims):
        x = rng.standard_normal(m)
        p["kendall"].append(dispatch_test(x, rng.standard_normal(m)).p_value)
        p["ks_bernoulli_target"].append(dispatch_test(x, rng.integers(0, 2, m).astype(float)).p_value)
        p["ks_balanced_target"].append(dispatch_test(x, rng.permutation(balanced)).p_value)
        p["fisher"].append(
            dispatch_test(rng.integers(0, 2, m).astype(float), rng.integers(0, 2, m).astype(float)).p_value
        )
    for name, values in p.items():
        values = np.asarray(values)
        distance = stats.kstest(values, "uniform").statistic
        rates = " ".join(f"{np.mean(values <= a):.4f}@{a}" for a in (0.01, 0.05, 0.1))
        print(f"{name:22s} distance={distance:.4f} rejection {rates}")


if __name__ == "__main__":
    main()
