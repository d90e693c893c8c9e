import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from advdomain.errors import ValidationError
from advdomain.linalg import (DesignMatrix, NormOrder, check_symmetric, dual_exponent, group_norm,
                              jacobi_eigenvalues, p_norm, row_norms, spectral_norm_symmetric,
                              spectral_norms_symmetric, top_eigenvalues_symmetric)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def sym(draw_arr):
    return 0.5 * (draw_arr + draw_arr.T)


@pytest.mark.parametrize("p,q", [(1, math.inf), (2, 2), (math.inf, 1), (1.5, 3.0), (3.0, 1.5)])
def test_dual_exponent(p, q):
    assert dual_exponent(p) == pytest.approx(q)


@pytest.mark.parametrize("bad", [0.5, 0, -1, float("nan")])
def test_norm_order_rejects(bad):
    with pytest.raises(ValidationError):
        NormOrder(bad)


@given(arrays(float, st.integers(1, 6), elements=finite), st.sampled_from([1, 1.5, 2, 3, math.inf]))
def test_p_norm_matches_numpy(v, p):
    assert p_norm(v, p) == pytest.approx(np.linalg.norm(v, p), rel=1e-12, abs=1e-300)


def test_group_norm_is_max_of_row_norms():
    M = np.array([[3.0, 4.0], [1.0, 1.0]])
    assert group_norm(M, 2, math.inf) == 5.0
    assert row_norms(M, 1).tolist() == [7.0, 2.0]


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 5)).map(lambda t: (t[0], t[0])), elements=finite))
def test_spectral_norm_against_two_eigensolvers(A):
    M = sym(A)
    ref = max(abs(np.linalg.eigvalsh(M))) if M.size else 0.0
    jac = max(abs(jacobi_eigenvalues(M)))
    scale = 1.0 + np.abs(M).max()
    assert spectral_norm_symmetric(M) == pytest.approx(ref, abs=1e-9 * scale)
    assert jac == pytest.approx(ref, abs=1e-9 * scale)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (4, 4), elements=finite))
def test_spectral_norm_sign_symmetric_bitwise(A):
    M = sym(A)
    assert spectral_norm_symmetric(M) == spectral_norm_symmetric(-M)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (3, 3), elements=finite))
def test_top_eigenvalue(A):
    M = sym(A)
    assert top_eigenvalues_symmetric(M[None])[0] == pytest.approx(np.linalg.eigvalsh(M)[-1], abs=1e-9 * (1 + np.abs(M).max()))


def test_batched_matches_single():
    rng = np.random.default_rng(1)
    Ms = rng.standard_normal((5, 3, 3))
    Ms = Ms + Ms.transpose(0, 2, 1)
    assert spectral_norms_symmetric(Ms).tolist() == [spectral_norm_symmetric(M) for M in Ms]


def test_repeated_extreme_eigenvalues():
    # +2 and -2 share the top modulus
    assert spectral_norm_symmetric(np.diag([2.0, -2.0, 1.0])) == pytest.approx(2.0, abs=1e-14)
    assert spectral_norm_symmetric(np.zeros((3, 3))) == 0.0


def test_asymmetric_rejected():
    with pytest.raises(ValidationError):
        check_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_csv_round_trip(tmp_path):
    D = DesignMatrix([[1.0, 2.0], [3.0, -4.0]], [1, -1])
    path = tmp_path / "d.csv"
    D.to_csv(path)
    back = DesignMatrix.from_csv(path)
    assert back.entries.tolist() == D.entries.tolist()
    assert back.labels.tolist() == [1.0, -1.0]


def test_csv_without_labels(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x1,x2\n1,0\n0,1\n")
    D = DesignMatrix.from_csv(path)
    assert D.labels is None and (D.n, D.d) == (2, 2)
    with pytest.raises(ValidationError, match="'label'"):
        D.require_labels()


@pytest.mark.parametrize("text", ["x1,label,x2\n1,1,0\n", "x1,x2\n1,nan\n", "x1,label\n1,0\n", ""])
def test_csv_rejects(tmp_path, text):
    path = tmp_path / "d.csv"
    path.write_text(text)
    with pytest.raises(ValidationError):
        DesignMatrix.from_csv(path)
