import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from advdomain.adversary import (AdversaryBudget, grid_oracle, grid_values, max_dot_over_box, max_shifted_square,
                                 min_bilinear_over_box, min_dot_over_box, min_product_over_box, min_shifted_square)
from advdomain.errors import ValidationError

coef = st.floats(-3, 3, allow_nan=False)
vec = arrays(float, st.integers(1, 3), elements=coef)
budget = st.floats(0, 1, allow_nan=False)


def sq(w, a):
    return lambda *c: (sum(wi * ci for wi, ci in zip(w, c)) + a) ** 2


def test_shifted_square_spot_values():
    # (u + 2v + 5)^2 over [-1, 1]^2, values from the stdlib grid oracle
    assert max_shifted_square([1.0, 2.0], 5.0, 1.0).optimum == 64.0
    assert min_shifted_square([1.0, 2.0], 5.0, 1.0).optimum == 4.0
    assert grid_oracle(sq([1.0, 2.0], 5.0), 2, 1.0, sense="max").optimum == 64.0
    assert grid_oracle(sq([1.0, 2.0], 5.0), 2, 1.0, sense="min").optimum == 4.0


def test_min_square_reaches_zero_inside_box():
    sol = min_shifted_square([1.0, 1.0], 0.5, 1.0)
    assert sol.optimum == 0.0
    assert sol.argpoint @ np.array([1.0, 1.0]) + 0.5 == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(vec, coef, budget, st.integers(0, 2 ** 31))
def test_shifted_square_bounds_random_points(w, a, e, seed):
    hi, lo = max_shifted_square(w, a, e), min_shifted_square(w, a, e)
    for s in (hi, lo):
        assert np.all(np.abs(s.argpoint) <= e)
    assert (w @ hi.argpoint + a) ** 2 == pytest.approx(hi.optimum, rel=1e-12, abs=1e-12)
    assert (w @ lo.argpoint + a) ** 2 == pytest.approx(lo.optimum, rel=1e-12, abs=1e-12)
    D = np.random.default_rng(seed).uniform(-e, e, (64, w.size))
    vals = (D @ w + a) ** 2
    assert vals.max() <= hi.optimum * (1 + 1e-12) + 1e-12
    assert vals.min() >= lo.optimum * (1 - 1e-12) - 1e-12


@settings(max_examples=100, deadline=None)
@given(vec, budget)
def test_dot_over_box(z, e):
    assert max_dot_over_box(z, e).optimum == pytest.approx(e * np.abs(z).sum())
    assert min_dot_over_box(z, e).optimum == pytest.approx(-e * np.abs(z).sum())
    assert z @ max_dot_over_box(z, e).argpoint == pytest.approx(e * np.abs(z).sum())


@pytest.mark.parametrize("bad", [-0.1, float("inf"), float("nan")])
def test_budget_validation(bad):
    with pytest.raises(ValidationError):
        AdversaryBudget(bad)


def test_grid_shape_and_validation():
    assert grid_values(lambda u, v: u + v, 2, 1.0, 5).shape == (5, 5)
    with pytest.raises(ValidationError):
        grid_values(lambda *c: 0.0, 4, 1.0, 5)
    with pytest.raises(ValidationError):
        grid_values(lambda c: c, 1, 1.0, 4)


@settings(max_examples=80, deadline=None)
@given(arrays(float, 2, elements=coef), arrays(float, 2, elements=coef), arrays(float, 2, elements=coef),
       st.floats(0.01, 1))
def test_edge_enumeration_against_grid(w, w2, x, e):
    exact = min_bilinear_over_box(w, w2, x, e, mode="edges")
    grid = min_bilinear_over_box(w, w2, x, e, mode="exact-small", points_per_axis=101)
    lower = min_bilinear_over_box(w, w2, x, e, mode="lower-bound")
    scale = 1 + abs(exact.optimum)
    assert exact.optimum <= grid.optimum + 1e-12 * scale
    assert np.all(np.abs(exact.argpoint) <= e)
    assert (w @ (x + exact.argpoint)) * (w2 @ (x + exact.argpoint)) == pytest.approx(exact.optimum, abs=1e-12 * scale)
    assert lower.optimum <= exact.optimum + 1e-12 * scale
    # a fine grid comes close to the exact value
    h = 2 * e / 100
    assert grid.optimum - exact.optimum <= 4 * h * (np.abs(w).sum() + np.abs(w2).sum()) * (np.abs(x).sum() + 3 * e) + 1e-12


def test_edge_enumeration_three_dims_corners():
    rng = np.random.default_rng(5)
    for _ in range(20):
        u, u2 = rng.standard_normal(3), rng.standard_normal(3)
        a, b = rng.standard_normal(2)
        val, arg = min_product_over_box(u, u2, a, b, 0.4)
        corners = [(a + u @ c) * (b + u2 @ c) for c in itertools.product((-0.4, 0.4), repeat=3)]
        assert val <= min(corners) + 1e-12
