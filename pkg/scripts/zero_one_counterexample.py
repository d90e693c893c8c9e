"""Reproduce a three-point instance where the adversarial 0-1 disagreement complexity is
below the standard one, with an independent check over random direction pairs."""
import math

import numpy as np

from advdomain import rademacher as rad

X = np.array([[0.14101844664131186, -1.1152488740307125],
              [-1.3825880643876292, -0.6865887385010088],
              [0.3302926852050741, -1.5144272753081038]])
EPS = 0.35178098661213364


def main():
    cmp = rad.zero_one_adv_vs_std_check(X, EPS)
    print(f"std {cmp.std:.6f}  adv {cmp.adv:.6f}  patterns std {cmp.patterns_std}  adv {cmp.patterns_adv}")
    U = rad._zero_one_directions(X, EPS, 360)
    k = U.shape[0]
    iu, iv = np.divmod(np.arange(k * k), k)
    std_p = {tuple(int(v) for v in r) for r in (rad._sgn(U[iu] @ X.T) != rad._sgn(U[iv] @ X.T)).astype(int)}
    adv_p = {tuple(int(v) for v in r) for r in rad._zero_one_adv_patterns(U, X, EPS).astype(int)}
    print("standard patterns the adversary cannot produce:", sorted(std_p - adv_p))
    t = np.random.default_rng(0).uniform(0, 2 * math.pi, 3000)
    R = np.stack([np.cos(t), np.sin(t)], axis=1)
    rand_p = {tuple(int(v) for v in r) for r in rad._zero_one_adv_patterns(R, X, EPS).astype(int)}
    print("random pairs add no pattern:", rand_p <= adv_p)


if __name__ == "__main__":
    main()
