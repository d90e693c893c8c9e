"""Acceptance criteria 1-9, one PASS/FAIL line each.

Tolerances and runtime budgets are pinned here, not taken from library defaults.
"""
import time

from advdomain import rademacher as rad
from advdomain import transfer as tf
from advdomain import verify as vf

SEED = 0


def _line(report, number, ok, detail, elapsed, budget):
    within = elapsed < budget
    verdict = "PASS" if ok and within else "FAIL"
    report(f"criterion {number}: {verdict} ({detail}; {elapsed:.1f}s of {budget:.0f}s)")
    return ok and within


def _timed(fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    return out, time.perf_counter() - t0


def test_criterion_1_inner_solvers(report):
    res, dt = _timed(vf.battery_inner, seed=SEED, count=500, points=201, grid_tol=1e-9, attain_tol=1e-12)
    m = res.metrics
    ok = _line(report, 1, res.passed and res.checked == 500,
               f"500 instances, worst grid beat {m['worst_grid_beat']:.2e}, worst attain {m['worst_attain_err']:.2e}",
               dt, 30)
    assert ok, res.failures[:3]


def test_criterion_2_lower_bounds(report):
    res, dt = _timed(vf.battery_lower, seed=SEED, count=50, slack_rel=1e-3, max_n=10)
    by = {"regression": 0, "zero-one": 0}
    for f in res.failures:
        by[f["setting"]] += 1
    detail = (f"50 instances per setting; regression violations {by['regression']}, "
              f"0-1 violations {by['zero-one']}")
    ok = _line(report, 2, res.passed, detail, dt, 300)
    assert ok, [(f["index"], f["setting"], f["std"], f["adv"]) for f in res.failures]


def test_criterion_3_upper_dominance(report):
    res, dt = _timed(vf.battery_upper, seed=SEED, count=100, k_stderr=4.0)
    ok = _line(report, 3, res.passed and res.checked >= 100,
               f"{res.checked} checks on 100 instances, worst margin {res.metrics['worst_margin']:.2e}", dt, 120)
    assert ok, res.failures[:3]


def test_criterion_4_spot_values(report):
    t0 = time.perf_counter()
    # one sample x = (1, 0) in d = 2, W = 1, p = 2
    X = [[1.0, 0.0]]
    H = rad.HypothesisClass("linear-classification", 2.0, 1.0)
    bern = rad.std_upper_bernstein_classification(X, H).value
    inst = tf.SubsetSumInstance([0.5, 0.3, 0.2], [0.2, 0.3, 0.5], [1, 0, 0], (1, 2))
    vb, wb = tf.vstar_bruteforce(inst)
    vm, wm = tf.vstar_meet_in_middle(inst)
    ok_b = abs(bern - 2.127207) <= 1e-5
    ok_v = vb == 0.3 and vm == 0.3 and wb.tolist() == wm.tolist() == [1, 0, 0]
    ok = _line(report, 4, ok_b and ok_v, f"bernstein {bern:.7f}, V* {vb!r}/{vm!r}", time.perf_counter() - t0, 10)
    assert ok


def test_criterion_5_subset_sum(report):
    res, dt = _timed(vf.battery_subset_sum, seed=SEED, count=500, mono_count=200)
    ok = _line(report, 5, res.passed and res.checked == 700, f"{res.checked} checks", dt, 60)
    assert ok, res.failures[:3]


def test_criterion_6_risk_transfer(report):
    res, dt = _timed(vf.battery_transfer, seed=SEED, count=200, max_n=10)
    ok = _line(report, 6, res.passed and res.checked == 200, f"{res.checked} instances", dt, 60)
    assert ok, res.failures[:3]


def test_criterion_7_pgd(report):
    res, dt = _timed(vf.battery_pgd, seed=SEED, count=100, tol=1e-9)
    ok = _line(report, 7, res.passed and res.checked == 100,
               f"100 models, worst gap {res.metrics['worst_err']:.2e}", dt, 10)
    assert ok, res.failures[:3]


def test_criterion_8_sweep(report):
    res, dt = _timed(vf.battery_sweep, threads=1)
    ok = _line(report, 8, res.passed, f"{res.checked} rows, golden {vf.DEFAULT_GOLDEN.name}", dt, 180)
    assert ok, res.failures


def test_criterion_9_discrepancy(report):
    res, dt = _timed(vf.battery_discrepancy, seed=SEED, count=50, grid_rel=1e-3)
    w = res.metrics["worst_margin"]
    ok = _line(report, 9, res.passed and res.checked == 100,
               f"50 instances x 2 variants, worst margin statement {w['statement']:.2e} proof {w['proof']:.2e}",
               dt, 300)
    assert ok, res.failures[:3]


def test_golden_sweep_properties():
    # zero-budget rows: the robust drop is the standard drop
    from advdomain import rademacher as rad_
    rows = vf.reference_sweep(threads=1)
    for r in rows:
        if r.eps == 0:
            assert r.delta == r.sa_source - r.sa_target
    # larger mu gives a smaller p = 1 adversarial-gap bound with W = ||w||_1
    from advdomain import training as tr_
    X = tr_.generate_domains(tr_.REFERENCE_SPEC).source.entries
    for e in tr_.REFERENCE_EPS_GRID:
        col = sorted((r for r in rows if r.eps == e), key=lambda r: r.mu)
        gaps = [rad_.adv_upper_classification(X, rad_.HypothesisClass("linear-classification", 1.0, r.w_l1), e).value
                for r in col]
        assert all(b <= a for a, b in zip(gaps, gaps[1:]))
