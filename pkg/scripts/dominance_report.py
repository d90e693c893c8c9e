"""Print the complexity chain std <= adv <= std + gap and the Bernstein bound on random small instances."""
import argparse

import numpy as np

from advdomain import rademacher as rad


def row(kind, X, p, W, eps):
    H = rad.HypothesisClass(kind, p, W)
    if kind == "linear-classification":
        std = rad.std_complexity_classification_grid(X, H).value
        adv = rad.adv_complexity_classification_exact_small(X, H, eps).value
        gap = rad.adv_upper_classification(X, H, eps).value
        bern = rad.std_upper_bernstein_classification(X, H).value
    else:
        std = rad.std_complexity_regression_grid(X, H).value
        adv = rad.adv_complexity_regression_exact_small(X, H, eps).value
        gap = rad.adv_upper_regression(X, H, eps).value
        bern = rad.std_upper_bernstein_regression(X, H).value
    return std, adv, std + gap, bern


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'kind':<22}{'n':>3}{'p':>5}{'eps':>7}{'std':>10}{'adv':>10}{'std+gap':>10}{'bernstein':>11}")
    for i in range(args.count):
        g = np.random.default_rng([args.seed, i])
        kind = "linear-classification" if i % 2 == 0 else "linear-regression"
        n, p, eps = int(g.integers(2, 7)), float(g.choice([1.0, 1.5, 2.0])), float(g.uniform(0, 0.3))
        X = g.standard_normal((n, 2))
        std, adv, up, bern = row(kind, X, p, 1.0, eps)
        print(f"{kind:<22}{n:>3}{p:>5}{eps:>7.3f}{std:>10.4f}{adv:>10.4f}{up:>10.4f}{bern:>11.4f}")


if __name__ == "__main__":
    main()
