import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from htype.spaces import (ScalarSpace, canonical_permutation, direct_sum_signature, mat_exp,
                          scalar_product, sign_symbol)


def test_sign_symbol():
    assert sign_symbol(1, 1) == -1
    assert sign_symbol(2, 1) == 1
    assert sign_symbol(3, 0) == 1
    with pytest.raises(ValueError):
        sign_symbol(0, 1)


def test_space_gram_and_signs():
    sp = ScalarSpace(4, 2)
    assert np.array_equal(sp.signs, [-1, -1, 1, 1])
    assert np.array_equal(sp.gram, np.diag([-1, -1, 1, 1]))
    with pytest.raises(ValueError):
        sp.signs[0] = 1.0


@pytest.mark.parametrize("dim,index", [(0, 0), (2, 3), (2, -1), (1.5, 0)])
def test_space_rejects_bad_signature(dim, index):
    with pytest.raises(ValueError):
        ScalarSpace(dim, index)


def test_scalar_product_examples():
    assert scalar_product(ScalarSpace(2, 1), [1, 0], [1, 0]) == -1
    assert scalar_product(ScalarSpace(2, 1), [1, 1], [1, 1]) == 0
    assert scalar_product(ScalarSpace(3, 0), [1, 2, 3], [1, 2, 3]) == 14
    with pytest.raises(ValueError):
        scalar_product(ScalarSpace(3, 0), [1, 2], [1, 2, 3])


vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10))


@given(vec3, vec3, vec3, st.floats(-5, 5), st.integers(0, 3))
def test_scalar_product_symmetric_bilinear(a, b, c, k, index):
    sp = ScalarSpace(3, index)
    assert scalar_product(sp, a, b) == pytest.approx(scalar_product(sp, b, a))
    lhs = scalar_product(sp, k * a + c, b)
    rhs = k * scalar_product(sp, a, b) + scalar_product(sp, c, b)
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_canonical_permutation_moves_negatives_first():
    perm = canonical_permutation([1, -1, 1, -1])
    assert perm.tolist() == [1, 3, 0, 2]
    assert np.all(np.array([1, -1, 1, -1])[perm] == [-1, -1, 1, 1])
    with pytest.raises(ValueError):
        canonical_permutation([1, 0])


def test_direct_sum_signature():
    sig = direct_sum_signature(ScalarSpace(2, 1), ScalarSpace(1, 0))
    assert sig.tolist() == [-1, 1, 1]


def test_mat_exp_examples():
    assert np.abs(mat_exp(np.zeros((2, 2))) - np.eye(2)).max() < 1e-15
    rot = mat_exp(np.pi * np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert np.abs(rot + np.eye(2)).max() < 1e-10
    s = 1.7
    hyp = mat_exp(s * np.array([[0.0, 1.0], [1.0, 0.0]]))
    expected = np.array([[np.cosh(s), np.sinh(s)], [np.sinh(s), np.cosh(s)]])
    assert np.abs(hyp - expected).max() < 1e-10


def test_mat_exp_rejects_bad_input():
    with pytest.raises(ValueError):
        mat_exp(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        mat_exp([[np.nan]])


def _expm_reference(A):
    with mpmath.workdps(40):
        return np.array(mpmath.expm(mpmath.matrix(A.tolist())).tolist(), dtype=float)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-1, 1)), st.floats(0.01, 20.0))
def test_mat_exp_matches_extended_precision(M, scale):
    A = scale * M
    ref = _expm_reference(A)
    assert np.abs(mat_exp(A) - ref).max() <= 1e-12 * max(1.0, np.abs(ref).max())


def test_mat_exp_agrees_with_scipy():
    rng = np.random.default_rng(4)
    for _ in range(20):
        A = rng.normal(size=(6, 6)) * rng.uniform(0.1, 5)
        ref = expm(A)
        assert np.abs(mat_exp(A) - ref).max() <= 1e-11 * max(1.0, np.abs(ref).max())


@settings(max_examples=30)
@given(arrays(np.float64, (4, 4), elements=st.floats(-3, 3)))
def test_mat_exp_inverse(M):
    prod = mat_exp(M) @ mat_exp(-M)
    assert np.abs(prod - np.eye(4)).max() < 1e-8 * max(1.0, np.abs(mat_exp(M)).max() ** 2)
