"""Seeded verification batteries.

Each battery draws its instances from numpy generators keyed by (seed, index),
so any failing instance can be replayed alone. Results carry the failing
instances in JSON-ready form.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import adversary as adv
from . import discrepancy as disc
from . import rademacher as rad
from . import training as tr
from . import transfer as tf

DEFAULT_GOLDEN = Path(__file__).resolve().parents[2] / "tests" / "data" / "reference_sweep.csv"


@dataclass
class BatteryResult:
    name: str
    passed: bool
    checked: int
    elapsed: float
    failures: List[dict] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "elapsed": round(self.elapsed, 3), "failures": self.failures, "metrics": self.metrics}


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([seed, i])


def _finish(name, t0, checked, failures, metrics) -> BatteryResult:
    return BatteryResult(name, not failures, checked, time.perf_counter() - t0, failures, metrics)


# 1 -------------------------------------------------------------------------

def battery_inner(seed: int = 0, count: int = 500, points: int = 201, grid_tol: float = 1e-9,
                  attain_tol: float = 1e-12) -> BatteryResult:
    """Closed-form shifted-square solvers against the full grid."""
    t0 = time.perf_counter()
    failures, worst_grid, worst_attain = [], -math.inf, 0.0
    for i in range(count):
        g = _rng(seed, i)
        d = int(g.integers(1, 4))
        w = g.uniform(-2, 2, d)
        a = 0.0 if g.random() < 0.05 else float(g.uniform(-3, 3))
        e = float(g.uniform(0, 1))
        hi = adv.max_shifted_square(w, a, e)
        lo = adv.min_shifted_square(w, a, e)
        vals = adv.grid_values(lambda *c: (sum(wi * ci for wi, ci in zip(w, c)) + a) ** 2, d, e, points)
        gmax, gmin = float(vals.max()), float(vals.min())
        beat = max(gmax - hi.optimum, lo.optimum - gmin)
        attain = max(abs((w @ hi.argpoint + a) ** 2 - hi.optimum), abs((w @ lo.argpoint + a) ** 2 - lo.optimum))
        feasible = bool(np.all(np.abs(hi.argpoint) <= e) and np.all(np.abs(lo.argpoint) <= e))
        worst_grid, worst_attain = max(worst_grid, beat), max(worst_attain, attain)
        if beat > grid_tol or attain > attain_tol or not feasible:
            failures.append({"index": i, "w": w.tolist(), "a": a, "eps": e, "grid_beat": beat,
                             "attain_err": attain, "feasible": feasible})
    return _finish("inner", t0, count, failures, {"worst_grid_beat": worst_grid, "worst_attain_err": worst_attain})


# 2 -------------------------------------------------------------------------

def _margin_instance(g, n, d, eps):
    """Points all farther than eps ||w0||_1 from the hyperplane of a random w0."""
    w0 = g.standard_normal(d)
    thr = eps * np.abs(w0).sum()
    pts = []
    while len(pts) < n:
        x = 1.5 * g.standard_normal(d)
        if abs(w0 @ x) > thr * (1 + 1e-9):
            pts.append(x)
    return np.array(pts)


def battery_lower(seed: int = 0, count: int = 50, slack_rel: float = 1e-3,
                  max_n: int = 10, zero_one_max_n: int = 8) -> BatteryResult:
    """Adversarial complexity at least the standard one (regression and 0-1 loss)."""
    t0 = time.perf_counter()
    failures, worst = [], math.inf
    for i in range(count):
        g = _rng(seed, i)
        n, d = int(g.integers(1, max_n + 1)), int(g.integers(1, 3))
        p = float(g.choice([1.0, 1.5, 2.0]))
        H = rad.HypothesisClass("linear-regression", p, float(g.uniform(0.5, 2)))
        e = float(g.uniform(0, 0.5))
        X = g.standard_normal((n, d))
        std = (rad.std_complexity_regression(X, H).value if p == 2
               else rad.std_complexity_regression_grid(X, H).value)
        a = rad.adv_complexity_regression_exact_small(X, H, e).value
        margin = a - (std - slack_rel * (1 + std))
        worst = min(worst, margin)
        if margin < 0:
            failures.append({"index": i, "setting": "regression", "X": X.tolist(), "p": p, "W": H.W,
                             "eps": e, "std": std, "adv": a})
        n01 = int(g.integers(1, zero_one_max_n + 1))
        e01 = float(g.uniform(0.05, 0.5))
        X01 = _margin_instance(g, n01, d, e01)
        cmp = rad.zero_one_adv_vs_std_check(X01, e01)
        worst = min(worst, cmp.adv - (cmp.std - slack_rel * (1 + cmp.std)))
        if not cmp.holds:
            failures.append({"index": i, "setting": "zero-one", "X": X01.tolist(), "eps": e01,
                             "std": cmp.std, "adv": cmp.adv})
    return _finish("lower", t0, 2 * count, failures, {"worst_margin": worst})


# 3 -------------------------------------------------------------------------

def battery_upper(seed: int = 0, count: int = 100, k_stderr: float = 4.0, max_n: int = 8) -> BatteryResult:
    """Analytic upper bounds dominate exact or sampled values."""
    t0 = time.perf_counter()
    failures, checks, worst = [], 0, math.inf

    def check(i, what, bound, value, stderr=0.0, **inst):
        nonlocal checks, worst
        checks += 1
        m = bound - (value - k_stderr * stderr)
        worst = min(worst, m)
        if m < 0:
            failures.append({"index": i, "check": what, "bound": bound, "value": value, "stderr": stderr, **inst})

    for i in range(count):
        g = _rng(seed, i)
        n, d = int(g.integers(1, max_n + 1)), int(g.integers(1, 3))
        X = g.standard_normal((n, d)) * g.uniform(0.5, 2)
        p = float(g.choice([1.0, 2.0, 4.0]))
        W, e = float(g.uniform(0.5, 2)), float(g.uniform(0, 0.3))
        inst = {"X": X.tolist(), "p": p, "W": W, "eps": e}
        Hc = rad.HypothesisClass("linear-classification", p, W)
        Hr = rad.HypothesisClass("linear-regression", p, W)
        if p == 2:
            std_c = rad.std_complexity_classification(X, Hc).value
            std_r = rad.std_complexity_regression(X, Hr).value
        else:
            std_c = rad.std_complexity_classification_grid(X, Hc).value
            std_r = rad.std_complexity_regression_grid(X, Hr).value
        check(i, "bernstein-classification", rad.std_upper_bernstein_classification(X, Hc).value, std_c, **inst)
        check(i, "bernstein-regression", rad.std_upper_bernstein_regression(X, Hr).value, std_r, **inst)
        adv_c = rad.adv_complexity_classification_exact_small(X, Hc, e).value
        check(i, "adv-classification", std_c + rad.adv_upper_classification(X, Hc, e).value, adv_c, **inst)
        adv_r = rad.adv_complexity_regression_exact_small(X, Hr, e).value
        check(i, "adv-regression", std_r + rad.adv_upper_regression(X, Hr, e).value, adv_r, **inst)
        Hn = rad.HypothesisClass("two-layer-relu", p, W, float(g.uniform(0.5, 2)), int(g.integers(1, 4)))
        Xn = g.standard_normal((n, int(g.integers(1, 4))))
        b0 = rad.nn_adv_upper(Xn, Hn, 0.0).value
        wit = rad.relu_complexity_witness(Xn, Hn, family_size=48, seed=seed + i)
        check(i, "relu-eps0", b0, wit.value, wit.stderr, X=Xn.tolist(), A=Hn.A, m=Hn.m, W=W, p=p)
        check(i, "relu-eps-monotone", rad.nn_adv_upper(Xn, Hn, e).value, b0, X=Xn.tolist(), eps=e)
        if i % 10 == 0:
            # a larger sample estimated by Monte-Carlo
            Xm = g.standard_normal((int(g.integers(13, 21)), d))
            Hm = rad.HypothesisClass("linear-classification", 2.0, W)
            mc = rad.std_complexity_classification(Xm, Hm, "mc", 2000, seed + i)
            check(i, "bernstein-classification-mc", rad.std_upper_bernstein_classification(Xm, Hm).value,
                  mc.value, mc.stderr, X=Xm.tolist(), W=W)
    return _finish("upper", t0, checks, failures, {"worst_margin": worst})


# 4 -------------------------------------------------------------------------

BERNSTEIN_UNIT = 2.127207


def battery_spot(bernstein_tol: float = 1e-5) -> BatteryResult:
    t0 = time.perf_counter()
    failures = []
    b = rad.std_upper_bernstein_classification([[1.0, 0.0]], rad.HypothesisClass()).value
    if abs(b - BERNSTEIN_UNIT) > bernstein_tol:
        failures.append({"check": "bernstein-unit", "value": b, "expected": BERNSTEIN_UNIT})
    inst = tf.SubsetSumInstance((0.5, 0.3, 0.2), (0.2, 0.3, 0.5), (1, 0, 0), (1, 2))
    v, wit = tf.vstar_bruteforce(inst)
    v2, wit2 = tf.vstar_meet_in_middle(inst)
    if not (v == 0.3 and v2 == 0.3 and wit.tolist() == [1, 0, 0] and wit2.tolist() == [1, 0, 0]):
        failures.append({"check": "vstar-example", "value": [v, v2], "witness": [wit.tolist(), wit2.tolist()]})
    return _finish("spot", t0, 2, failures, {"bernstein_unit": b, "vstar_example": v})


# 5 -------------------------------------------------------------------------

def _ss_instance(g, max_n=20):
    N = int(g.integers(1, max_n + 1))
    free = tuple(int(j) for j in np.flatnonzero(g.random(N) < g.random()))
    return tf.SubsetSumInstance(g.dirichlet(np.ones(N)), g.dirichlet(np.ones(N)), g.integers(0, 2, N), free)


def battery_subset_sum(seed: int = 0, count: int = 500, mono_count: int = 200) -> BatteryResult:
    t0 = time.perf_counter()
    failures = []
    for i in range(count):
        inst = _ss_instance(_rng(seed, i))
        a, b = tf.vstar_bruteforce(inst), tf.vstar_meet_in_middle(inst)
        if not (a[0] == b[0] and np.array_equal(a[1], b[1])):
            failures.append({"index": i, "check": "cross-solver", "instance": inst.to_json(),
                             "bruteforce": [a[0], a[1].tolist()], "mitm": [b[0], b[1].tolist()]})
    for i in range(mono_count):
        g = _rng(seed, 10_000 + i)
        inst = _ss_instance(g)
        extra = [j for j in range(inst.N) if j not in inst.free and g.random() < 0.5]
        bigger = tf.SubsetSumInstance(inst.p, inst.p_prime, inst.ell, inst.free + tuple(extra))
        v_small, v_big = tf.vstar(inst)[0], tf.vstar(bigger)[0]
        if v_small < v_big:
            failures.append({"index": i, "check": "monotone", "instance": inst.to_json(),
                             "bigger": bigger.to_json(), "v": v_small, "v_bigger": v_big})
    return _finish("subset-sum", t0, count + mono_count, failures, {})


# 6 -------------------------------------------------------------------------

def battery_transfer(seed: int = 0, count: int = 200, max_n: int = 10) -> BatteryResult:
    t0 = time.perf_counter()
    failures, worst = [], math.inf
    for i in range(count):
        g = _rng(seed, i)
        N, d = int(g.integers(1, max_n + 1)), int(g.integers(1, 4))
        X = g.standard_normal((N, d))
        pair = tf.DiscreteDomainPair(X, g.dirichlet(np.ones(N)), g.dirichlet(np.ones(N)),
                                     g.choice([-1.0, 1.0], N))
        w = g.standard_normal(d)
        e = float(g.choice([0.0, 0.05, 0.1, 0.3, 1.0]))
        c = tf.erm_vs_robust_comparison(pair, w, e)
        worst = min(worst, c.robust.rhs - c.robust.lhs)
        if not (c.robust.holds and c.ok):
            failures.append({"index": i, "support": X.tolist(), "mass_T": pair.mass_T.tolist(),
                             "mass_Tprime": pair.mass_Tprime.tolist(), "labels": pair.labels.tolist(),
                             "w": w.tolist(), "eps": e, "result": c.to_dict()})
    return _finish("transfer", t0, count, failures, {"worst_slack": worst})


# 7 -------------------------------------------------------------------------

def battery_pgd(seed: int = 0, count: int = 100, tol: float = 1e-9) -> BatteryResult:
    t0 = time.perf_counter()
    cfg = tr.TrainConfig(eps=8 / 255, pgd_steps=7, pgd_step_size=2 / 255)
    failures, worst = [], 0.0
    for i in range(count):
        g = _rng(seed, i)
        d = int(g.integers(1, 21))
        model = tr.LinearModel(g.standard_normal(d))
        X = g.uniform(0, 1, (32, d))
        y = g.choice([-1.0, 1.0], 32)
        Xp = tr.pgd_attack_linear(model, X, y, cfg)
        got = tr.margin_loss(y * model.decision(Xp), cfg.loss)
        want = tr.worst_case_loss(model, X, y, cfg.eps, cfg.loss)
        err = float(np.abs(got - want).max())
        worst = max(worst, err)
        if err > tol:
            failures.append({"index": i, "w": model.w.tolist(), "err": err})
    return _finish("pgd", t0, count, failures, {"worst_err": worst})


# 8 -------------------------------------------------------------------------

def reference_sweep(threads: int = 1) -> List[tr.SweepRow]:
    return tr.l1_sweep_experiment(tr.REFERENCE_SPEC, tr.REFERENCE_MU_GRID, tr.REFERENCE_EPS_GRID,
                                  threads=threads)


def battery_sweep(golden: Optional[Path] = None, threads: int = 1) -> BatteryResult:
    t0 = time.perf_counter()
    rows = reference_sweep(threads)
    table = {(r.mu, r.eps): r for r in rows}
    failures = []
    for e in (2 / 255, 4 / 255, 8 / 255):
        if table[(1e-2, e)].delta > table[(0.0, e)].delta:
            failures.append({"check": "direction", "eps": e, "delta_mu0": table[(0.0, e)].delta,
                             "delta_mu1e-2": table[(1e-2, e)].delta})
    golden = Path(golden) if golden else DEFAULT_GOLDEN
    text = tr.sweep_csv(rows)
    if not golden.exists():
        failures.append({"check": "golden", "error": f"golden file {golden} not found"})
    elif golden.read_text(encoding="utf-8") != text:
        failures.append({"check": "golden", "error": "sweep CSV differs from the golden file"})
    return _finish("sweep", t0, len(rows), failures, {"rows": len(rows)})


# 9 -------------------------------------------------------------------------

def battery_discrepancy(seed: int = 0, count: int = 50, grid_rel: float = rad.GRID_REL_TOL) -> BatteryResult:
    t0 = time.perf_counter()
    failures, worst = [], {"statement": math.inf, "proof": math.inf}
    for i in range(count):
        g = _rng(seed, i)
        d = int(g.integers(1, 3))
        S = g.standard_normal((int(g.integers(1, 7)), d))
        T = g.standard_normal((int(g.integers(1, 7)), d)) * g.uniform(0.5, 1.5) + g.uniform(-1, 1, d)
        H = rad.HypothesisClass("linear-regression", float(g.choice([1.0, 1.5, 2.0, 3.0])), float(g.uniform(0.25, 1)))
        e = float(g.uniform(0, 0.3))
        std = disc.hdh_discrepancy_bruteforce(S, T, H)
        a = disc.hdh_discrepancy_bruteforce(S, T, H, adversarial=True, eps=e)
        for variant in ("statement", "proof"):
            slack = disc.estimate_adv_disc_from_std(S, T, H, e, variant=variant)
            m = std + slack + grid_rel * (1 + std) - a
            worst[variant] = min(worst[variant], m)
            if m < 0:
                failures.append({"index": i, "variant": variant, "S": S.tolist(), "T": T.tolist(), "p": H.p,
                                 "W": H.W, "eps": e, "std": std, "adv": a, "slack": slack})
    return _finish("discrepancy", t0, 2 * count, failures, {"worst_margin": worst})


BATTERIES: Dict[str, Callable[..., BatteryResult]] = {
    "inner": battery_inner,
    "lower": battery_lower,
    "upper": battery_upper,
    "spot": battery_spot,
    "subset-sum": battery_subset_sum,
    "transfer": battery_transfer,
    "pgd": battery_pgd,
    "sweep": battery_sweep,
    "discrepancy": battery_discrepancy,
}
SEEDED = {"inner", "lower", "upper", "subset-sum", "transfer", "pgd", "discrepancy"}


def run(only: Optional[List[str]] = None, seed: int = 0, threads: int = 1,
        golden: Optional[Path] = None) -> List[BatteryResult]:
    names = only or list(BATTERIES)
    out = []
    for name in names:
        fn = BATTERIES[name]
        if name in SEEDED:
            out.append(fn(seed=seed))
        elif name == "sweep":
            out.append(fn(golden=golden, threads=threads))
        else:
            out.append(fn())
    return out
