import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from advdomain import discrepancy as disc
from advdomain.errors import ValidationError
from advdomain.rademacher import GRID_REL_TOL, HypothesisClass

REG = HypothesisClass("linear-regression", 2.0, 1.0)
CLS = HypothesisClass("linear-classification", 2.0, 1.0)
# frozen from scripts/oracle_values.py
COROLLARY_ZERO = 11.523873495839048


def test_regression_closed_form_spot():
    assert disc.hdh_discrepancy_regression([[1.0, 0.0]], [[0.0, 1.0]], REG) == pytest.approx(4.0, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 5), st.just(2)), elements=st.floats(-2, 2, allow_nan=False)),
       arrays(float, st.tuples(st.integers(1, 5), st.just(2)), elements=st.floats(-2, 2, allow_nan=False)))
def test_bruteforce_matches_closed_form(S, T):
    exact = disc.hdh_discrepancy_regression(S, T, REG)
    brute = disc.hdh_discrepancy_bruteforce(S, T, REG)
    assert brute <= exact * (1 + 1e-9) + 1e-12
    assert brute >= exact - GRID_REL_TOL * (1 + exact)


def test_classification_slack_spot():
    S, T = [[1.0, 0.0, 0.0, 0.0]], [[0.0, 1.0, 0.0, 0.0]]
    assert disc.estimate_adv_disc_from_std(S, T, CLS, 0.1) == pytest.approx(0.8, rel=1e-14)


def test_proof_variant_fails_for_large_radius():
    # S = {0}, T = {1}, W = 2, eps = 0.1: std 16, adv 16 (1.1^2 - 0.1^2) = 19.2
    H = HypothesisClass("linear-regression", 2.0, 2.0)
    S, T = [[0.0]], [[1.0]]
    std = disc.hdh_discrepancy_bruteforce(S, T, H)
    adv = disc.hdh_discrepancy_bruteforce(S, T, H, adversarial=True, eps=0.1)
    assert std == pytest.approx(16.0)
    assert adv == pytest.approx(19.2)
    proof = disc.estimate_adv_disc_from_std(S, T, H, 0.1, variant="proof")
    statement = disc.estimate_adv_disc_from_std(S, T, H, 0.1, variant="statement")
    assert proof == pytest.approx(1.6) and statement == pytest.approx(3.2)
    assert adv > std + proof
    assert adv <= std + statement + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_adversarial_bounded_by_slack(seed):
    g = np.random.default_rng(seed)
    S, T = g.standard_normal((3, 2)), g.standard_normal((3, 2)) + 0.5
    H = HypothesisClass("linear-regression", float(g.choice([1.0, 2.0, 3.0])), float(g.uniform(0.25, 1)))
    e = float(g.uniform(0, 0.3))
    std = disc.hdh_discrepancy_bruteforce(S, T, H)
    adv = disc.hdh_discrepancy_bruteforce(S, T, H, adversarial=True, eps=e)
    for variant in ("statement", "proof"):
        assert adv <= std + disc.estimate_adv_disc_from_std(S, T, H, e, variant=variant) + GRID_REL_TOL * (1 + std)


def test_zero_one_discrepancy_range():
    g = np.random.default_rng(3)
    S, T = g.standard_normal((4, 2)), g.standard_normal((4, 2)) + 1.0
    std = disc.hdh_discrepancy_bruteforce(S, T, CLS)
    adv = disc.hdh_discrepancy_bruteforce(S, T, CLS, adversarial=True, eps=0.2)
    assert 0.0 <= std <= 1.0 and 0.0 <= adv <= 1.0
    assert disc.hdh_discrepancy_bruteforce(S, S, CLS) == 0.0


def test_discrepancy_validation():
    with pytest.raises(ValidationError):
        disc.hdh_discrepancy_regression([[1.0]], [[1.0]], HypothesisClass("linear-regression", 3.0))
    with pytest.raises(ValidationError):
        disc.hdh_discrepancy_bruteforce(np.zeros((2, 3)), np.zeros((2, 3)), REG)
    with pytest.raises(ValidationError):
        disc.hdh_discrepancy_bruteforce(np.zeros((13, 1)), np.zeros((12, 1)), REG)
    with pytest.raises(ValidationError):
        disc.estimate_adv_disc_from_std([[1.0]], [[1.0]], REG, 0.1, variant="other")


def test_standard_bound_all_zero():
    # only concentration remains: 2 * 3 sqrt(ln(1/c)/9) with ln(1/c) = 1
    rep = disc.assemble_standard_bound(0, 0, [0, 0], 0, 0, 9, 9, 1.0, math.exp(-1))
    assert rep.total == pytest.approx(2.0, rel=1e-14)


def test_corollary_bound_all_zero():
    rep = disc.assemble_corollary_bound(0, 0, [0, 0, 0], 0, 0, 9, 9)
    assert rep.total == pytest.approx(COROLLARY_ZERO, rel=1e-14)


def test_corollary_modes_differ_only_in_discrepancy():
    a = disc.assemble_corollary_bound(0.1, 1.0, [0.1, 0.2, 0.3], 0.5, 0.5, 100, 100, mode="statement")
    b = disc.assemble_corollary_bound(0.1, 1.0, [0.1, 0.2, 0.3], 0.5, 0.5, 100, 100, mode="proof")
    assert a.discrepancy == 4.0 and b.discrepancy == 3.0
    assert a.total - b.total == pytest.approx(1.0)
    assert a.lambda_terms == pytest.approx(6 * 0.1 + 3 * 0.2 + 3 * 0.3)


def test_lemma_bounds_scale_complexity_by_loss_bound():
    rep = disc.assemble_adversarial_bound(0.2, 0.3, [0.1, 0.1, 0.1], 0.4, 0.5, 50, 60, loss_bound=2.0)
    assert rep.complexity_source == pytest.approx(1.6) and rep.complexity_target == pytest.approx(2.0)
    assert rep.total == pytest.approx(math.fsum([0.2, 0.3, 0.3, 1.6, 2.0, 6 * math.sqrt(math.log(20) / 50),
                                                 6 * math.sqrt(math.log(20) / 60)]))
    assert "total" in rep.table()


@pytest.mark.parametrize("kw", [{"confidence": 1.5}, {"confidence": 0.0}, {"n_source": 0}, {"loss_bound": -1}])
def test_bound_validation(kw):
    args = dict(source_risk=0, discrepancy=0, lambda_parts=[0, 0], complexity_source=0, complexity_target=0,
                n_source=5, n_target=5)
    args.update(kw)
    with pytest.raises(ValidationError):
        disc.assemble_standard_bound(**args)


def test_wrong_lambda_count():
    with pytest.raises(ValidationError):
        disc.assemble_adversarial_bound(0, 0, [0, 0], 0, 0, 5, 5)
