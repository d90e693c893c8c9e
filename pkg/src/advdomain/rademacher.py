"""Standard and adversarial Rademacher complexity over pair classes.

All quantities are for the disagreement class of pairs (w, w') drawn from the
same norm ball. Exact values enumerate every sign pattern (n <= 12); larger
samples fall back to Monte-Carlo with a standard error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .adversary import BudgetLike, _eps, min_product_over_box
from .errors import ValidationError
from .linalg import (DesignMatrix, NormOrder, dual_exponent, group_norm, row_norms,
                     spectral_norm_symmetric, spectral_norms_symmetric,
                     top_eigenvalues_symmetric)

EXACT_MAX_N = 12
MC_MIN_SAMPLES = 100
MC_DEFAULT_SAMPLES = 10_000
GRID_REL_TOL = 1e-3
KINDS = ("linear-classification", "linear-regression", "two-layer-relu")
METHODS = ("exact-enumeration", "monte-carlo", "witness-lower", "analytic-upper")


@dataclass(frozen=True)
class HypothesisClass:
    kind: str = "linear-classification"
    p: float = 2.0
    W: float = 1.0
    A: float = 1.0
    m: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown hypothesis kind {self.kind!r}")
        object.__setattr__(self, "p", NormOrder(self.p).p)
        if not (self.W > 0 and math.isfinite(self.W)):
            raise ValidationError(f"W must be positive, got {self.W}")
        if self.kind == "two-layer-relu":
            if not (self.A > 0 and math.isfinite(self.A)):
                raise ValidationError(f"A must be positive, got {self.A}")
            if int(self.m) != self.m or self.m < 1:
                raise ValidationError(f"m must be a positive integer, got {self.m}")

    @property
    def q(self) -> float:
        return dual_exponent(self.p)


@dataclass(frozen=True)
class LossSpec:
    kind: str = "classification-phi"
    lipschitz: float = 1.0

    def __post_init__(self):
        if self.kind not in ("classification-phi", "squared", "zero-one"):
            raise ValidationError(f"unknown loss kind {self.kind!r}")
        if not self.lipschitz > 0:
            raise ValidationError("lipschitz constant must be positive")


@dataclass
class RademacherEstimate:
    value: float
    method: str
    stderr: float = 0.0
    samples: int = 0
    quantity: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if self.method != "monte-carlo" and self.stderr != 0.0:
            raise ValidationError("stderr must be 0 for deterministic methods")

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "method": self.method, "value": self.value,
                "stderr": self.stderr, "samples": self.samples, "params": dict(self.params)}


def _entries(X) -> np.ndarray:
    if isinstance(X, DesignMatrix):
        return X.entries
    return DesignMatrix(X).entries


def _require(H: HypothesisClass, kind: str):
    if H.kind != kind:
        raise ValidationError(f"expected a {kind} class, got {H.kind}")


def sign_patterns(n: int, half: bool = False) -> np.ndarray:
    """All sign vectors in {+1,-1}^n, first coordinate most significant.

    With half=True only the patterns with sigma_1 = +1 are returned; the rest
    are their negatives.
    """
    if n > EXACT_MAX_N:
        raise ValidationError(f"exact enumeration needs n <= {EXACT_MAX_N}, got n={n}")
    count = 2 ** (n - 1) if half else 2 ** n
    j = np.arange(count)[:, None]
    bits = (j >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1.0 - 2.0 * bits


def _mc_signs(n: int, samples: int, seed: int) -> np.ndarray:
    if samples < MC_MIN_SAMPLES:
        raise ValidationError(f"monte-carlo needs samples >= {MC_MIN_SAMPLES}")
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1.0, 1.0]), size=(samples, n))


def signed_sums(X: np.ndarray, sigmas: np.ndarray) -> np.ndarray:
    """S(sigma) = sum_i sigma_i x_i x_i^T for each row of sigmas."""
    outer = np.einsum("ij,ik->ijk", X, X)
    return np.einsum("si,ijk->sjk", sigmas, outer)


def _mean(vals) -> float:
    vals = np.asarray(vals, dtype=float)
    return math.fsum(vals) / vals.size


def _stderr(vals) -> float:
    vals = np.asarray(vals, dtype=float)
    mu = _mean(vals)
    return math.sqrt(math.fsum((vals - mu) ** 2) / (vals.size - 1)) / math.sqrt(vals.size)


def _chunked(fn, sigmas, chunk=4096):
    return np.concatenate([fn(sigmas[i:i + chunk]) for i in range(0, sigmas.shape[0], chunk)])


def _pattern_estimate(per_sigma, n, method, samples, seed, half=False, quantity="", params=None):
    """Average a per-pattern functional over exact or sampled sign patterns."""
    params = dict(params or {})
    if method in ("exact", "exact-enumeration"):
        sig = sign_patterns(n, half=half)
        vals = _chunked(per_sigma, sig)
        return RademacherEstimate(_mean(vals), "exact-enumeration", 0.0, sig.shape[0], quantity, params)
    if method in ("mc", "monte-carlo"):
        sig = _mc_signs(n, samples, seed)
        vals = _chunked(per_sigma, sig)
        params["seed"] = seed
        return RademacherEstimate(_mean(vals), "monte-carlo", _stderr(vals), samples, quantity, params)
    raise ValidationError(f"unknown method {method!r}")


def expected_spectral_norm(X, method: str = "exact", samples: int = MC_DEFAULT_SAMPLES,
                           seed: int = 0, half: bool = True) -> RademacherEstimate:
    """E over sigma of ||sum_i sigma_i x_i x_i^T||_2.

    The norm is even in sigma, so exact enumeration visits half the patterns
    by default; half=False walks all of them and gives the identical float.
    """
    X = _entries(X)
    fn = lambda s: spectral_norms_symmetric(signed_sums(X, s))
    return _pattern_estimate(fn, X.shape[0], method, samples, seed, half=half,
                             quantity="expected_spectral_norm")


def _bracket_factors(p: float, d: int) -> Tuple[float, float]:
    f = float(d) ** (1.0 - 2.0 / p) if not math.isinf(p) else float(d)
    return min(1.0, f), max(1.0, f)


def _p_factor(p: float, d: int) -> float:
    if p <= 2:
        return 1.0
    return float(d) ** (1.0 - 2.0 / p) if not math.isinf(p) else float(d)


def _scaled(est: RademacherEstimate, k: float, quantity: str, **params) -> RademacherEstimate:
    return RademacherEstimate(k * est.value, est.method, k * est.stderr, est.samples, quantity,
                              {**est.params, **params})


def std_complexity_classification(X, H: HypothesisClass, method: str = "exact",
                                  samples: int = MC_DEFAULT_SAMPLES, seed: int = 0):
    """(W^2/n) E||S(sigma)|| for p = 2; for other p a (lower, upper) pair."""
    _require(H, "linear-classification")
    X = _entries(X)
    n, d = X.shape
    base = expected_spectral_norm(X, method, samples, seed)
    k = H.W ** 2 / n
    if H.p == 2:
        return _scaled(base, k, "std_complexity_classification", p=H.p, W=H.W)
    lo, hi = _bracket_factors(H.p, d)
    return (_scaled(base, k * lo, "std_complexity_classification_lower", p=H.p, W=H.W),
            _scaled(base, k * hi, "std_complexity_classification_upper", p=H.p, W=H.W))


def _bernstein_core(X: np.ndarray) -> float:
    d = X.shape[1]
    sq = row_norms(X, 2) ** 2
    # sum_i (x_i x_i^T)^2 = X^T diag(||x_i||^2) X
    M = X.T @ (sq[:, None] * X)
    M = 0.5 * (M + M.T)
    log2d = math.log(2 * d)
    return math.sqrt(2.0 * spectral_norm_symmetric(M) * log2d) + float(sq.max()) * log2d / 3.0


def std_upper_bernstein_classification(X, H: HypothesisClass) -> RademacherEstimate:
    _require(H, "linear-classification")
    X = _entries(X)
    n, d = X.shape
    val = H.W ** 2 / n * _bernstein_core(X) * _p_factor(H.p, d)
    return RademacherEstimate(val, "analytic-upper", quantity="std_upper_bernstein_classification",
                              params={"p": H.p, "W": H.W})


def std_upper_bernstein_regression(X, H: HypothesisClass) -> RademacherEstimate:
    _require(H, "linear-regression")
    X = _entries(X)
    n, d = X.shape
    val = 4 * H.W ** 2 / n * _bernstein_core(X) * _p_factor(H.p, d)
    return RademacherEstimate(val, "analytic-upper", quantity="std_upper_bernstein_regression",
                              params={"p": H.p, "W": H.W})


def _dual_scale(p: float, d: int) -> float:
    """d^(1/p*) with p* the dual exponent; equals 1 when p = 1."""
    q = dual_exponent(p)
    return 1.0 if math.isinf(q) else float(d) ** (1.0 / q)


def adv_gap_classification_appendix(X: np.ndarray, W: float, eps: float, p: float) -> float:
    n, d = X.shape
    dp = _dual_scale(p, d)
    xq = group_norm(X, dual_exponent(p), math.inf)
    return (2 * eps * dp * W * W / math.sqrt(n)
            * (1 + math.sqrt(d) * math.sqrt(math.log(3 * math.sqrt(n))))
            * (eps * dp + 2 * xq))


def adv_upper_classification(X, H: HypothesisClass, eps: BudgetLike, constant_mode: str = "appendix",
                             c: Optional[float] = None) -> RademacherEstimate:
    """Additive gap between adversarial and standard complexity, classification.

    theorem mode evaluates c W^2 sqrt(d ln n)/sqrt(n) * e(e + ||X||_{p*,inf})
    with e = eps d^(1/p*); when c is not given it returns the appendix value.
    """
    _require(H, "linear-classification")
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    params = {"p": H.p, "W": H.W, "eps": e, "constant_mode": constant_mode}
    if constant_mode == "appendix" or (constant_mode == "theorem" and c is None):
        val = adv_gap_classification_appendix(X, H.W, e, H.p)
        params["constant"] = "appendix"
    elif constant_mode == "theorem":
        dp = _dual_scale(H.p, d)
        xq = group_norm(X, dual_exponent(H.p), math.inf)
        val = c * H.W ** 2 * math.sqrt(d * math.log(n)) / math.sqrt(n) * e * dp * (e * dp + xq)
        params["constant"] = c
    else:
        raise ValidationError(f"constant_mode must be 'theorem' or 'appendix', got {constant_mode!r}")
    return RademacherEstimate(val, "analytic-upper", quantity="adv_gap_classification", params=params)


def adv_lower_gap_classification(X, H: HypothesisClass, method: str = "exact",
                                 samples: int = MC_DEFAULT_SAMPLES, seed: int = 0) -> RademacherEstimate:
    """Lower bound on the adversarial-minus-standard gap.

    Zero for p <= 2. For p > 2 the raw value (W^2/n)(1 - d^(1-2/p)) E||S|| is
    negative once d > 1, so the reported value is max(0, raw) and the raw
    number is kept in params.
    """
    _require(H, "linear-classification")
    X = _entries(X)
    n, d = X.shape
    if H.p <= 2:
        return RademacherEstimate(0.0, "witness-lower", quantity="adv_lower_gap_classification",
                                  params={"p": H.p, "raw": 0.0})
    base = expected_spectral_norm(X, method, samples, seed)
    k = H.W ** 2 / n * (1.0 - _p_factor(H.p, d))
    raw = k * base.value
    tag = "monte-carlo" if base.method == "monte-carlo" else "witness-lower"
    return RademacherEstimate(max(0.0, raw), tag, abs(k) * base.stderr, base.samples,
                              "adv_lower_gap_classification", {"p": H.p, "raw": raw})


def std_complexity_regression(X, H: HypothesisClass, method: str = "exact",
                              samples: int = MC_DEFAULT_SAMPLES, seed: int = 0):
    """(4W^2/n) E max(lambda_max(S(sigma)), 0) for p = 2; bracket otherwise."""
    _require(H, "linear-regression")
    X = _entries(X)
    n, d = X.shape
    fn = lambda s: np.maximum(top_eigenvalues_symmetric(signed_sums(X, s)), 0.0)
    base = _pattern_estimate(fn, n, method, samples, seed, quantity="expected_positive_top_eigenvalue")
    k = 4 * H.W ** 2 / n
    if H.p == 2:
        return _scaled(base, k, "std_complexity_regression", p=H.p, W=H.W)
    lo, hi = _bracket_factors(H.p, d)
    return (_scaled(base, k * lo, "std_complexity_regression_lower", p=H.p, W=H.W),
            _scaled(base, k * hi, "std_complexity_regression_upper", p=H.p, W=H.W))


# direction search ---------------------------------------------------------

def _unit_p(U: np.ndarray, p: float) -> np.ndarray:
    return U / row_norms(U, p)[:, None]


def _angles_to_dirs(theta: np.ndarray, d: int) -> np.ndarray:
    """Map angle parameters (..., d-1) to unit 2-norm directions (..., d)."""
    if d == 2:
        t = theta[..., 0]
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    t, ph = theta[..., 0], theta[..., 1]
    return np.stack([np.sin(t) * np.cos(ph), np.sin(t) * np.sin(ph), np.cos(t)], axis=-1)


def _dirs_to_angles(U: np.ndarray) -> np.ndarray:
    if U.shape[-1] == 2:
        return np.arctan2(U[..., 1], U[..., 0])[..., None]
    r = np.linalg.norm(U, axis=-1)
    return np.stack([np.arccos(np.clip(U[..., 2] / r, -1, 1)), np.arctan2(U[..., 1], U[..., 0])], axis=-1)


def fibonacci_sphere(count: int) -> np.ndarray:
    k = np.arange(count) + 0.5
    z = 1 - 2 * k / count
    r = np.sqrt(1 - z * z)
    phi = math.pi * (3 - math.sqrt(5)) * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def compass_maximize(f, start: np.ndarray, step: float, min_step: float = 1e-10,
                     max_iter: int = 400) -> Tuple[np.ndarray, np.ndarray]:
    """Batched compass search.

    f(params, rows) maps (r, k) parameters for the given row indices to (r,)
    values. Rows whose step fell below min_step are not evaluated again.
    """
    x = np.array(start, dtype=float)
    P, k = x.shape
    best = f(x, np.arange(P))
    steps = np.full(P, step)
    for _ in range(max_iter):
        rows = np.flatnonzero(steps >= min_step)
        if rows.size == 0:
            break
        improved = np.zeros(rows.size, dtype=bool)
        for j in range(k):
            for sgn in (1.0, -1.0):
                cand = x[rows].copy()
                cand[:, j] += sgn * steps[rows]
                val = f(cand, rows)
                better = val > best[rows]
                x[rows[better]] = cand[better]
                best[rows[better]] = val[better]
                improved |= better
        steps[rows[~improved]] *= 0.5
    return x, best


def _direction_grid(d: int, grid: Optional[int]) -> Tuple[np.ndarray, float]:
    """Start directions (even objective, so half the circle for d = 2)."""
    if d == 2:
        k = grid or 720
        t = math.pi * np.arange(k) / k
        return np.stack([np.cos(t), np.sin(t)], axis=1), math.pi / k
    k = grid or 2000
    return fibonacci_sphere(k), math.sqrt(4 * math.pi / k)


def _adv_reg_terms(U: np.ndarray, X: np.ndarray, eps: float) -> np.ndarray:
    """(eps ||u||_1 + |u^T x_i|)^2 for directions U (..., d) against all rows."""
    l1 = np.abs(U).sum(axis=-1)
    return (eps * l1[..., None] + np.abs(U @ X.T)) ** 2


def adv_complexity_regression_exact_small(X, H: HypothesisClass, eps: BudgetLike,
                                          sphere_grid: Optional[int] = None) -> RademacherEstimate:
    """E_sigma sup_{||v||_p <= 2W} (1/n) sum sigma_i (eps||v||_1 + |v^T x_i|)^2.

    The objective is homogeneous of degree two in v, so the sup is (2W)^2 times
    the best unit-p direction, or 0 when every direction is negative. Directions
    come from a grid (exact for d = 1) refined per pattern by compass search.
    """
    _require(H, "linear-regression")
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    if d > 3:
        raise ValidationError(f"exact-small adversarial regression needs d <= 3, got d={d}")
    sig = sign_patterns(n)
    scale = (2 * H.W) ** 2 / n
    if d == 1:
        q = _adv_reg_terms(np.ones((1, 1)), X, e)[0]
        vals = sig @ q
    else:
        U, step = _direction_grid(d, sphere_grid)
        U = _unit_p(U, H.p)
        grid_vals = _adv_reg_terms(U, X, e) @ sig.T
        start = U[np.argmax(grid_vals, axis=0)]

        def f(theta, rows):
            V = _unit_p(_angles_to_dirs(theta, d), H.p)
            return np.einsum("pi,pi->p", _adv_reg_terms(V[:, None, :], X, e)[:, 0, :], sig[rows])

        _, vals = compass_maximize(f, _dirs_to_angles(start), step)
        vals = np.maximum(vals, grid_vals.max(axis=0))
    vals = scale * np.maximum(vals, 0.0)
    return RademacherEstimate(_mean(vals), "exact-enumeration", 0.0, sig.shape[0],
                              "adv_complexity_regression",
                              {"p": H.p, "W": H.W, "eps": e, "grid_rel_tol": GRID_REL_TOL})


def std_complexity_regression_grid(X, H: HypothesisClass, sphere_grid: Optional[int] = None):
    """Standard regression complexity for any p by the same direction search."""
    est = adv_complexity_regression_exact_small(X, H, 0.0, sphere_grid)
    est.quantity = "std_complexity_regression"
    return est


def adv_gap_regression_appendix(X: np.ndarray, W: float, eps: float, p: float) -> float:
    n, d = X.shape
    norms = row_norms(X, 2)
    rd = math.sqrt(d)
    inner = (rd * eps + 2.0 / n * math.fsum(norms)
             + math.sqrt(math.fsum((rd * eps + 2 * norms) ** 2)) * math.sqrt(2 * d * math.log(6 * n)))
    return 4 * W * W / n * rd * eps * inner * _p_factor(p, d)


def adv_upper_regression(X, H: HypothesisClass, eps: BudgetLike, constant_mode: str = "appendix",
                         c: Optional[float] = None) -> RademacherEstimate:
    _require(H, "linear-regression")
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    params = {"p": H.p, "W": H.W, "eps": e, "constant_mode": constant_mode}
    if constant_mode == "appendix" or (constant_mode == "theorem" and c is None):
        val = adv_gap_regression_appendix(X, H.W, e, H.p)
        params["constant"] = "appendix"
    elif constant_mode == "theorem":
        x2 = group_norm(X, 2, math.inf)
        val = (c * H.W ** 2 * d * math.sqrt(math.log(n)) / math.sqrt(n)
               * (e * x2 + math.sqrt(d) * e * e) * _p_factor(H.p, d))
        params["constant"] = c
    else:
        raise ValidationError(f"constant_mode must be 'theorem' or 'appendix', got {constant_mode!r}")
    return RademacherEstimate(val, "analytic-upper", quantity="adv_gap_regression", params=params)


# classification, adversarial, small d --------------------------------------

def _circle(k: int, p: float) -> Tuple[np.ndarray, np.ndarray]:
    t = 2 * math.pi * np.arange(k) / k
    return t, _unit_p(np.stack([np.cos(t), np.sin(t)], axis=1), p)


def _adv_products(U, U2, X, eps):
    """min over the box of (u^T(x+delta))(u2^T(x+delta)) for aligned rows of U, U2."""
    a = U @ X.T
    b = U2 @ X.T
    vals, _ = min_product_over_box(U[:, None, :], U2[:, None, :], a, b, eps, with_arg=False)
    return vals


def adv_complexity_classification_exact_small(X, H: HypothesisClass, eps: BudgetLike,
                                              direction_grid: int = 180) -> RademacherEstimate:
    """E_sigma sup over the pair ball of (1/n) sum sigma_i min_delta w^T(x+d) w'^T(x+d).

    The product is homogeneous of degree one in each factor, so the sup is W^2
    times the best pair of unit-p directions (or 0). Inner minima are exact;
    the direction pair is a grid refined by compass search. d <= 2.
    """
    _require(H, "linear-classification")
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    if d > 2:
        raise ValidationError(f"adversarial classification search needs d <= 2, got d={d}")
    sig = sign_patterns(n)
    if d == 1:
        U = np.array([[1.0], [-1.0]])
        pu = np.repeat(U, 2, axis=0)
        pv = np.tile(U, (2, 1))
        vals = (_adv_products(pu, pv, X, e) @ sig.T).max(axis=0)
    else:
        t, U = _circle(direction_grid, H.p)
        k = len(t)
        iu, iv = np.divmod(np.arange(k * k), k)
        table = _adv_products(U[iu], U[iv], X, e)
        best = np.full(sig.shape[0], -np.inf)
        arg = np.zeros(sig.shape[0], dtype=int)
        for s in range(0, sig.shape[0], 256):
            block = table @ sig[s:s + 256].T
            j = np.argmax(block, axis=0)
            arg[s:s + 256] = j
            best[s:s + 256] = block[j, np.arange(block.shape[1])]
        start = np.stack([t[iu[arg]], t[iv[arg]]], axis=1)

        def f(th, rows):
            V = _unit_p(np.stack([np.cos(th[:, 0]), np.sin(th[:, 0])], axis=1), H.p)
            V2 = _unit_p(np.stack([np.cos(th[:, 1]), np.sin(th[:, 1])], axis=1), H.p)
            return np.einsum("pi,pi->p", _adv_products(V, V2, X, e), sig[rows])

        _, refined = compass_maximize(f, start, 2 * math.pi / k)
        vals = np.maximum(refined, best)
    vals = H.W ** 2 / n * np.maximum(vals, 0.0)
    return RademacherEstimate(_mean(vals), "exact-enumeration", 0.0, sig.shape[0],
                              "adv_complexity_classification",
                              {"p": H.p, "W": H.W, "eps": e, "grid_rel_tol": GRID_REL_TOL})


def std_complexity_classification_grid(X, H: HypothesisClass, direction_grid: int = 180) -> RademacherEstimate:
    """Standard classification complexity for any p by the same direction search."""
    est = adv_complexity_classification_exact_small(X, H, 0.0, direction_grid)
    est.quantity = "std_complexity_classification"
    return est


# two-layer ReLU ------------------------------------------------------------

def nn_adv_upper(X, H: HypothesisClass, eps: BudgetLike, q: Optional[float] = None) -> RademacherEstimate:
    """Explicit upper bound on the adversarial complexity of the two-layer ReLU pair class."""
    _require(H, "two-layer-relu")
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    q = H.q if q is None else NormOrder(q).p
    d2q = 1.0 if math.isinf(q) else float(d) ** (2.0 / q)
    sq = row_norms(X, q) ** 2
    t = sq + d2q * e * e
    val = (2.0 / n * H.A ** 2 * H.W ** 2
           * (math.sqrt(math.fsum(t ** 2)) * math.sqrt((1 + d) * 4 * H.m * math.log(3 * n))
              + 4 * (float(sq.max()) + d2q * e * e)))
    return RademacherEstimate(val, "analytic-upper", quantity="nn_adv_upper",
                              params={"p": H.p, "q": q, "W": H.W, "A": H.A, "m": H.m, "eps": e})


def _relu_family(H: HypothesisClass, d: int, size: int, rng) -> Tuple[np.ndarray, np.ndarray]:
    a = rng.standard_normal((size, H.m))
    a = H.A * a / np.abs(a).sum(axis=1, keepdims=True)
    Wm = rng.standard_normal((size, H.m, d))
    Wm = H.W * Wm / row_norms(Wm.reshape(-1, d), H.p).reshape(size, H.m, 1)
    return a, Wm


def relu_complexity_witness(X, H: HypothesisClass, family_size: int = 64, seed: int = 0,
                            samples: int = MC_DEFAULT_SAMPLES) -> RademacherEstimate:
    """Lower estimate of the standard ReLU pair complexity.

    The sup is restricted to a random family of feasible networks (plus the
    zero network), which can only lower it. Exact over sigma for n <= 12.
    """
    _require(H, "two-layer-relu")
    X = _entries(X)
    n, d = X.shape
    rng = np.random.default_rng(seed)
    a, Wm = _relu_family(H, d, family_size, rng)
    out = np.einsum("fm,fmi->fi", a, np.maximum(np.einsum("fmd,id->fmi", Wm, X), 0.0))
    out = np.vstack([out, np.zeros((1, n))])
    iu, iv = np.divmod(np.arange(out.shape[0] ** 2), out.shape[0])
    prods = out[iu] * out[iv] / n
    fn = lambda s: (prods @ s.T).max(axis=0)
    method = "exact" if n <= EXACT_MAX_N else "mc"
    est = _pattern_estimate(fn, n, method, samples, seed, quantity="relu_complexity_witness",
                            params={"family_size": family_size, "seed": seed})
    if est.method == "exact-enumeration":
        est.method = "witness-lower"
    return est


# zero-one loss -------------------------------------------------------------

@dataclass
class ZeroOneComparison:
    std: float
    adv: float
    slack: float
    holds: bool
    patterns_std: int
    patterns_adv: int


def _candidate_angles(X: np.ndarray, eps: float, grid: int) -> np.ndarray:
    pts = [X]
    if eps > 0:
        for c in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            pts.append(X + eps * np.asarray(c, dtype=float))
    P = np.vstack(pts)
    base = np.arctan2(P[:, 1], P[:, 0])
    crit = np.concatenate([base + math.pi / 2, base - math.pi / 2]) % (2 * math.pi)
    crit = np.unique(crit)
    mids = (crit + np.diff(np.append(crit, crit[0] + 2 * math.pi)) / 2) % (2 * math.pi)
    uni = 2 * math.pi * np.arange(grid) / grid
    return np.unique(np.concatenate([crit, mids, uni]))


def _zero_one_directions(X: np.ndarray, eps: float, grid: int) -> np.ndarray:
    d = X.shape[1]
    if d == 1:
        return np.array([[1.0], [-1.0], [0.0]])
    # the same candidate set is used with and without the adversary
    t = _candidate_angles(X, eps, grid)
    return np.vstack([np.stack([np.cos(t), np.sin(t)], axis=1), np.zeros((1, 2))])


def _sgn(v):
    return np.where(v >= 0, 1.0, -1.0)


def _zero_one_adv_patterns(U, X, eps, delta_grid=None):
    k = U.shape[0]
    iu, iv = np.divmod(np.arange(k * k), k)
    a = U[iu] @ X.T
    b = U[iv] @ X.T
    clean = _sgn(a) != _sgn(b)
    if eps == 0:
        return clean
    if delta_grid is None:
        prod, _ = min_product_over_box(U[iu][:, None, :], U[iv][:, None, :], a, b, eps, with_arg=False)
        # a zero classifier has constant sign +1: it disagrees iff the other can go negative
        l1u = np.abs(U).sum(axis=1)
        zu = (l1u[iu] == 0)[:, None] & (b - eps * l1u[iv][:, None] < 0)
        zv = (l1u[iv] == 0)[:, None] & (a - eps * l1u[iu][:, None] < 0)
        return clean | (prod < 0) | zu | zv
    from .adversary import grid_axis
    ax = grid_axis(eps, delta_grid)
    D = np.stack(np.meshgrid(*([ax] * X.shape[1]), indexing="ij"), axis=-1).reshape(-1, X.shape[1])
    out = clean.copy()
    for delta in D:
        Xs = X + delta
        out |= _sgn(U[iu] @ Xs.T) != _sgn(U[iv] @ Xs.T)
    return out


def zero_one_complexities(X, eps: BudgetLike, w_grid: int = 360,
                          delta_grid: Optional[int] = None) -> Tuple[float, float, int, int]:
    """Standard and adversarial 0-1 disagreement complexities of sign classifiers.

    Returns (std, adv, distinct std loss patterns, distinct adv loss patterns).
    """
    X = _entries(X)
    e = _eps(eps)
    n, d = X.shape
    if d > 2 or n > 10:
        raise ValidationError("0-1 comparison supports d <= 2 and n <= 10")
    U = _zero_one_directions(X, e, w_grid)
    k = U.shape[0]
    iu, iv = np.divmod(np.arange(k * k), k)
    std_pat = np.unique(_sgn(U[iu] @ X.T) != _sgn(U[iv] @ X.T), axis=0).astype(float)
    adv_pat = np.unique(_zero_one_adv_patterns(U, X, e, delta_grid), axis=0).astype(float)
    sig = sign_patterns(n)
    std = _mean((std_pat @ sig.T).max(axis=0) / n)
    adv = _mean((adv_pat @ sig.T).max(axis=0) / n)
    return std, adv, std_pat.shape[0], adv_pat.shape[0]


def zero_one_adv_vs_std_check(X, eps: BudgetLike, w_grid: int = 360,
                              delta_grid: Optional[int] = None) -> ZeroOneComparison:
    std, adv, ns, na = zero_one_complexities(X, eps, w_grid, delta_grid)
    slack = GRID_REL_TOL * (1 + std)
    return ZeroOneComparison(std, adv, slack, adv >= std - slack, ns, na)
