import importlib
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given

from bjcalc.quantize import (
    ConsistencyError,
    Scheme,
    bj_to_weyl_poly,
    convert,
    dequantize,
    op_bj_average,
    op_bj_monomial,
    op_w_average,
    op_w_monomial,
    quantize,
    weyl_to_bj_poly,
)
from bjcalc.scalars import HBAR, I
from bjcalc.symbols import P, PolySymbol, X
from bjcalc.text import parse_operator, parse_symbol
from bjcalc.weyl import NormalOperator

from conftest import normal_operators, poly_symbols
from test_weyl import _normal_order_word


def _weyl_oracle(r, s):
    """Weyl ordering is the uniform average over every arrangement of the word."""
    n = r + s
    total = NormalOperator()
    count = 0
    for xs in combinations(range(n), r):
        word = ["P"] * n
        for j in xs:
            word[j] = "X"
        total = total + _normal_order_word(word)
        count += 1
    return total.scale(Fraction(1, count))


def _bj_oracle(r, s):
    total = NormalOperator()
    for k in range(s + 1):
        total = total + _normal_order_word(["P"] * (s - k) + ["X"] * r + ["P"] * k)
    return total.scale(Fraction(1, s + 1))


def test_x2p2_weyl():
    assert quantize(X**2 * P**2, Scheme.WEYL) == parse_operator("X^2 P^2 - 2 i hbar X P - 1/2 hbar^2")


def test_x2p2_born_jordan():
    assert quantize(X**2 * P**2, Scheme.BORN_JORDAN) == parse_operator("X^2 P^2 - 2 i hbar X P - 2/3 hbar^2")


def test_schemes_agree_below_degree_three():
    for r in range(3):
        for s in range(3 - r):
            assert op_w_monomial(r, s) == op_bj_monomial(r, s)
    assert op_w_monomial(1, 2) == op_bj_monomial(1, 2)
    assert op_w_monomial(2, 2) != op_bj_monomial(2, 2)


@pytest.mark.parametrize("r", range(5))
@pytest.mark.parametrize("s", range(5))
def test_closed_forms_match_word_oracles(r, s):
    assert op_w_monomial(r, s) == _weyl_oracle(r, s)
    assert op_bj_monomial(r, s) == _bj_oracle(r, s)


def test_averages_match_closed_forms():
    for r in range(6):
        for s in range(6):
            assert op_w_average(r, s) == op_w_monomial(r, s)
            assert op_bj_average(r, s) == op_bj_monomial(r, s)


@pytest.mark.parametrize("scheme", list(Scheme))
@given(a=poly_symbols(6))
def test_dequantize_inverts_quantize(scheme, a):
    assert dequantize(quantize(a, scheme), scheme) == a


@pytest.mark.parametrize("scheme", list(Scheme))
@given(op=normal_operators(6))
def test_quantize_inverts_dequantize(scheme, op):
    assert quantize(dequantize(op, scheme), scheme) == op


def test_dequantize_examples():
    assert dequantize(parse_operator("X P"), Scheme.WEYL) == parse_symbol("x p + 1/2 i hbar")
    assert dequantize(parse_operator("X P"), Scheme.BORN_JORDAN) == parse_symbol("x p + 1/2 i hbar")


def test_quantization_is_linear():
    a, b = X**3 * P, P**2 * X**2
    for scheme in Scheme:
        assert quantize(a + b.scale(I * HBAR), scheme) == quantize(a, scheme) + quantize(b, scheme).scale(I * HBAR)


def test_real_symbols_give_symmetric_operators():
    # formal adjoint: X, P self-adjoint, i -> -i, order reversed
    def adjoint(op):
        out = NormalOperator()
        for (r, s), c in op.terms.items():
            out = out + (NormalOperator.monomial(0, s) * NormalOperator.monomial(r, 0)).scale(c.conjugate())
        return out

    for r in range(4):
        for s in range(4):
            for scheme in Scheme:
                q = quantize(X**r * P**s, scheme)
                assert adjoint(q) == q


def test_weyl_to_bj_x2p2():
    assert weyl_to_bj_poly(X**2 * P**2, verify=True) == parse_symbol("x^2 p^2 + 1/6 hbar^2")
    assert bj_to_weyl_poly(X**2 * P**2, verify=True) == parse_symbol("x^2 p^2 - 1/6 hbar^2")


@pytest.mark.parametrize("r", range(0, 11, 2))
@pytest.mark.parametrize("s", range(0, 11, 3))
def test_series_maps_match_composite_oracle(r, s):
    a = X**r * P**s
    assert bj_to_weyl_poly(a) == dequantize(quantize(a, Scheme.BORN_JORDAN), Scheme.WEYL)
    assert weyl_to_bj_poly(a) == dequantize(quantize(a, Scheme.WEYL), Scheme.BORN_JORDAN)


@given(poly_symbols(6))
def test_series_maps_are_mutually_inverse(a):
    assert weyl_to_bj_poly(bj_to_weyl_poly(a)) == a
    assert bj_to_weyl_poly(weyl_to_bj_poly(a)) == a


def test_convert_dispatch():
    a = X**4 * P**2
    assert convert(a, "bj", "weyl") == bj_to_weyl_poly(a)
    assert convert(a, Scheme.WEYL, Scheme.BORN_JORDAN) == weyl_to_bj_poly(a)
    assert convert(X, "bj", "weyl") == X
    assert convert(a, "weyl", "weyl") is a


def test_verify_flag_catches_tampering(monkeypatch):
    q = importlib.import_module("bjcalc.quantize")  # the package re-exports a function of the same name

    monkeypatch.setattr(q, "theta_series_coeff", lambda k: Fraction(1))
    with pytest.raises(ConsistencyError):
        q.bj_to_weyl_poly(X**2 * P**2, verify=True)
