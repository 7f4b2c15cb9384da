from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given

from bjcalc.scalars import (
    HBAR,
    I,
    ONE,
    ZERO,
    ExactScalar,
    bernoulli,
    theta_inv_series_coeff,
    theta_series_coeff,
)

from conftest import exact_scalars


def _bernoulli_oracle(m_max):
    # sum_{j<=m} C(m+1, j) B_j = 0, which fixes B_1 = -1/2
    B = [Fraction(1)]
    for m in range(1, m_max + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


def _reciprocal_series(c, n):
    inv = [1 / c[0]]
    for k in range(1, n + 1):
        inv.append(-sum(c[j] * inv[k - j] for j in range(1, k + 1)) / c[0])
    return inv


def test_gaussian_constructors():
    assert ExactScalar.gaussian(0) == ZERO
    assert ExactScalar.coerce(1) == ONE
    assert I * I == -ONE
    assert (HBAR**2).hbar_degrees() == {2}
    assert ExactScalar.gaussian(Fraction(1, 2), -3, 2).coefficient(2) == (Fraction(1, 2), Fraction(-3))


def test_zero_terms_dropped():
    assert ExactScalar({3: (Fraction(0), Fraction(0))}) == ZERO
    assert not (HBAR - HBAR)
    assert (HBAR - HBAR).terms == {}


def test_negative_power_of_monomial():
    assert (HBAR ** -2) * HBAR**2 == ONE
    assert (2 * I * HBAR) ** -1 == ExactScalar.gaussian(0, Fraction(-1, 2), -1)
    with pytest.raises(ZeroDivisionError):
        ZERO ** -1
    with pytest.raises(ZeroDivisionError):
        (ONE + HBAR) ** -1


def test_evaluate_and_conjugate():
    c = ExactScalar.gaussian(1, 2, 1) + ExactScalar.gaussian(3)
    assert c.evaluate(0.5) == pytest.approx(3.5 + 1j)
    assert c.conjugate().evaluate(0.5) == pytest.approx(3.5 - 1j)


@given(exact_scalars(), exact_scalars(), exact_scalars())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@given(exact_scalars(), exact_scalars())
def test_hash_consistent_with_eq(a, b):
    if a == b:
        assert hash(a) == hash(b)
    assert hash(a + b) == hash(b + a)


@given(exact_scalars())
def test_evaluate_is_homomorphism(a):
    assert (a * a).evaluate(1.3) == pytest.approx(a.evaluate(1.3) ** 2, rel=1e-12, abs=1e-12)


def test_bernoulli_matches_recurrence_oracle():
    oracle = _bernoulli_oracle(30)
    assert [bernoulli(m) for m in range(31)] == oracle
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_theta_series_is_sinc_taylor():
    # sin(t)/t = sum (-1)^k t^(2k) / (2k+1)!
    for k in range(10):
        assert theta_series_coeff(k) == Fraction((-1) ** k, factorial(2 * k + 1))


def test_inverse_series_is_power_series_reciprocal():
    c = [theta_series_coeff(k) for k in range(13)]
    inv = _reciprocal_series(c, 12)
    assert [theta_inv_series_coeff(k) for k in range(13)] == inv
    assert theta_inv_series_coeff(1) == Fraction(1, 6)
    assert theta_inv_series_coeff(2) == Fraction(7, 360)
