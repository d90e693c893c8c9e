"""Independent re-evaluation of the frozen numbers used by the test suite.

Only the standard library is used here so that the values do not share code
with the package. Run it and compare against the constants in tests/.
"""
import itertools
import math


def bernstein_unit():
    # n=1, x=(1,0), d=2, W=1: sum (x x^T)^2 has norm 1, max row norm^2 = 1
    log2d = math.log(4.0)
    return math.sqrt(2.0 * 1.0 * log2d) + 1.0 * log2d / 3.0


ORACLE_X = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (-1.0, 2.0)]


def adv_gap_classification_appendix(X, W, eps, p_star_power):
    # p = 2 so the dual is 2 and d^{1/p*} = sqrt(d)
    n, d = len(X), len(X[0])
    dp = d ** p_star_power
    xnorm = max(math.sqrt(sum(t * t for t in row)) for row in X)
    return (2 * eps * dp * W * W / math.sqrt(n)
            * (1 + math.sqrt(d) * math.sqrt(math.log(3 * math.sqrt(n))))
            * (eps * dp + 2 * xnorm))


def adv_gap_regression_appendix(X, W, eps):
    n, d = len(X), len(X[0])
    norms = [math.sqrt(sum(t * t for t in row)) for row in X]
    rd = math.sqrt(d)
    inner = (rd * eps + 2.0 / n * sum(norms)
             + math.sqrt(sum((rd * eps + 2 * r) ** 2 for r in norms)) * math.sqrt(2 * d * math.log(6 * n)))
    return 4 * W * W / n * rd * eps * inner


def relu_unit():
    # eps=0, one unit-norm sample, A=W=1, m=1, n=1, d=2, q=2
    return 2.0 * (1.0 * math.sqrt(3 * 4 * math.log(3.0)) + 4.0)


def eig2(a, b, c):
    # eigenvalues of [[a, b], [b, c]]
    tr, det = a + c, a * c - b * b
    disc = math.sqrt(max(tr * tr / 4 - det, 0.0))
    return tr / 2 - disc, tr / 2 + disc


def regression_std_exact(X, W):
    n = len(X)
    total = 0.0
    for sig in itertools.product((1, -1), repeat=n):
        a = sum(s * x[0] * x[0] for s, x in zip(sig, X))
        b = sum(s * x[0] * x[1] for s, x in zip(sig, X))
        c = sum(s * x[1] * x[1] for s, x in zip(sig, X))
        total += max(eig2(a, b, c)[1], 0.0)
    return 4 * W * W / n * total / 2 ** n


def adv_regression_1d(x, W, eps, steps=200001):
    # sup over |v| <= 2W of sigma * (eps|v| + |v x|)^2, averaged over sigma
    best = {1: 0.0, -1: 0.0}
    for k in range(steps):
        v = -2 * W + 4 * W * k / (steps - 1)
        val = (eps * abs(v) + abs(v * x)) ** 2
        best[1] = max(best[1], val)
        best[-1] = max(best[-1], -val)
    return (best[1] + best[-1]) / 2


def vstar_example():
    p, pp, ell, free = (0.5, 0.3, 0.2), (0.2, 0.3, 0.5), (1, 0, 0), (1, 2)
    target = sum(a * b for a, b in zip(pp, ell))
    best = None
    for bits in itertools.product((0, 1), repeat=len(free)):
        lt = list(ell)
        for i, bval in zip(free, bits):
            lt[i] = bval
        val = abs(sum(a * b for a, b in zip(p, lt)) - target)
        if best is None or val < best[0]:
            best = (val, tuple(lt))
    return best


def grid_shifted(w, a, eps, pts=201, maximize=True):
    axis = [-eps + 2 * eps * k / (pts - 1) for k in range(pts)]
    vals = [(w[0] * u + w[1] * v + a) ** 2 for u in axis for v in axis]
    return max(vals) if maximize else min(vals)


if __name__ == "__main__":
    print("bernstein_unit", repr(bernstein_unit()))
    print("adv_gap_classification n4 d2", repr(adv_gap_classification_appendix(ORACLE_X, 1.0, 0.1, 0.5)))
    print("adv_gap_regression n4 d2", repr(adv_gap_regression_appendix(ORACLE_X, 1.0, 0.1)))
    print("relu_unit", repr(relu_unit()))
    print("reg std {e1,e2}", repr(regression_std_exact([(1.0, 0.0), (0.0, 1.0)], 1.0)))
    print("reg std e1", repr(regression_std_exact([(1.0, 0.0)], 1.0)))
    print("adv reg 1d", repr(adv_regression_1d(1.0, 0.5, 0.2)))
    print("vstar", vstar_example())
    print("max shifted grid", grid_shifted((1.0, 2.0), 5.0, 1.0))
    print("min shifted grid", grid_shifted((1.0, 2.0), 5.0, 1.0, maximize=False))
    print("class slack", 2 * 1 * 1 * math.sqrt(4) * 0.1 * (1 + 1))
    print("hdh reg e1 vs e2", 4 * 1.0 * max(abs(1.0), abs(-1.0)))
    print("standard zero bound", 2 * 3 * math.sqrt(1.0 / 9))
    print("corollary zero c=0.05 n=9", 2 * 9 * math.sqrt(math.log(2 / 0.05) / 9))
    print("lower gap p4 d3 raw", 0.5 * (1 - 3 ** 0.5) * 1.0)
