#!/usr/bin/env python3
"""
Tests for the complex linear algebra core (products, determinants, rank, unitarity).
"""

import math

import numpy as np
import pytest

from algebra.field_constructor import cyclotomic_m2, golden_m1
from algebra.linalg_core import (
    adjugate,
    cofactor_det,
    det,
    is_unitary,
    kron,
    matmul,
    numerical_rank,
)
from codes.code_library import encode_golden
from delay.delay_model import DelayProfile, apply_delay


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# =============================================================================
# PRODUCTS
# =============================================================================

def test_matmul_identity_and_permutation():
    eye = np.eye(2)
    np.testing.assert_allclose(matmul(eye, eye), eye)
    a = np.array([[1, 2], [3, 4]])
    np.testing.assert_allclose(matmul([[0, 1], [1, 0]], a), [[3, 4], [1, 2]])


def test_matmul_matches_triple_loop(rng):
    a = random_complex(rng, 3, 4)
    b = random_complex(rng, 4, 2)
    expected = np.zeros((3, 2), dtype=complex)
    for i in range(3):
        for j in range(2):
            for k in range(4):
                expected[i, j] += a[i, k] * b[k, j]
    np.testing.assert_allclose(matmul(a, b), expected, atol=1e-12)


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        matmul(np.eye(2), np.eye(3))


def test_matmul_rejects_non_finite():
    with pytest.raises(ValueError):
        matmul([[np.nan, 0], [0, 1]], np.eye(2))


def test_kron_identity_and_golden_entry():
    np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    m4 = kron(cyclotomic_m2(2), golden_m1())
    alpha = 1 + 1j - 1j * (1 + math.sqrt(5)) / 2
    assert abs(m4[0, 0] - alpha / math.sqrt(10)) < 1e-12


def test_kron_mixed_product_and_associativity(rng):
    a, b, c, d = (random_complex(rng, 2, 3), random_complex(rng, 3, 2),
                  random_complex(rng, 3, 2), random_complex(rng, 2, 2))
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)
    x, y, z = (random_complex(rng, 2, 2) for _ in range(3))
    np.testing.assert_allclose(kron(kron(x, y), z), kron(x, kron(y, z)), atol=1e-12)


# =============================================================================
# DETERMINANTS
# =============================================================================

def test_det_basic():
    assert abs(det(np.eye(4)) - 1) < 1e-12
    assert abs(det([[1, 2], [1, 2]])) < 1e-12
    with pytest.raises(ValueError):
        det(np.ones((2, 3)))


def test_det_golden_weight_one():
    x = encode_golden([1, 0, 0, 0]).matrix
    assert abs(det(x) - (2 + 1j) / 5) < 1e-12


def test_det_multiplicative(rng):
    for _ in range(20):
        a = random_complex(rng, 4, 4) / 2
        b = random_complex(rng, 4, 4) / 2
        assert abs(det(a @ b) - det(a) * det(b)) <= 1e-9


def test_cofactor_det_agrees_with_lu(rng):
    for n in (2, 3, 4):
        a = random_complex(rng, 5, n, n)
        np.testing.assert_allclose(cofactor_det(a), det(a), atol=1e-10)


def test_adjugate_identity(rng):
    a = random_complex(rng, 3, 3)
    np.testing.assert_allclose(adjugate(a) @ a, det(a) * np.eye(3), atol=1e-10)


def test_adjugate_of_singular_matrix():
    a = np.array([[1, 2, 3], [2, 4, 6], [1, 0, 1]], dtype=complex)
    adj = adjugate(a)
    assert np.max(np.abs(adj)) > 0
    np.testing.assert_allclose(a @ adj, np.zeros((3, 3)), atol=1e-12)


# =============================================================================
# RANK / UNITARITY
# =============================================================================

def test_numerical_rank_examples():
    assert numerical_rank(np.zeros((2, 3))) == 0
    assert numerical_rank(np.eye(4)) == 4
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), tol=0)


def test_golden_delayed_difference_has_rank_one():
    shifted = apply_delay(encode_golden([1, 0, 0, 0]), DelayProfile((1, 0)))
    assert numerical_rank(shifted.matrix) == 1


def test_rank_invariant_under_unitaries(rng):
    a = random_complex(rng, 4, 2) @ random_complex(rng, 2, 4)
    u, v = random_unitary(rng, 4), random_unitary(rng, 4)
    assert numerical_rank(a) == 2
    assert numerical_rank(u @ a @ v) == 2


def test_is_unitary():
    assert is_unitary(np.eye(3))
    assert not is_unitary(np.diag([2.0, 1.0]))
    assert is_unitary(kron(cyclotomic_m2(2), golden_m1()), 1e-12)


def test_kron_of_unitaries_is_unitary(rng):
    assert is_unitary(kron(random_unitary(rng, 2), random_unitary(rng, 3)), 1e-12)
