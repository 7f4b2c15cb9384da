"""Weyl and Born-Jordan quantization of polynomial symbols, and the maps between them."""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .scalars import HBAR, I, theta_inv_series_coeff, theta_series_coeff
from .symbols import PolySymbol
from .weyl import PHAT, XHAT, NormalOperator


class Scheme(enum.Enum):
    WEYL = "weyl"
    BORN_JORDAN = "bj"


class ConsistencyError(RuntimeError):
    """Two routes that must agree produced different results."""


def _closed_form(r: int, s: int, weight) -> NormalOperator:
    terms = {}
    for ell in range(min(r, s) + 1):
        c = (-I * HBAR) ** ell * (comb(s, ell) * comb(r, ell) * weight(ell))
        terms[(r - ell, s - ell)] = c
    return NormalOperator(terms)


@lru_cache(maxsize=None)
def op_w_monomial(r: int, s: int) -> NormalOperator:
    """Weyl quantization of ``x^r p^s``, weights ``l!/2^l``."""
    return _closed_form(r, s, lambda ell: Fraction(factorial(ell), 2**ell))


@lru_cache(maxsize=None)
def op_bj_monomial(r: int, s: int) -> NormalOperator:
    """Born-Jordan quantization of ``x^r p^s``, weights ``l!/(l+1)``."""
    return _closed_form(r, s, lambda ell: Fraction(factorial(ell), ell + 1))


def _average(r: int, s: int, p_weights, x_weights) -> NormalOperator:
    """Evaluate both orderings of a symmetrised product and insist they agree.

    ``p_weights[l]`` multiplies ``P^(s-l) X^r P^l``; ``x_weights[l]``
    multiplies ``X^l P^s X^(r-l)``.
    """
    via_p = NormalOperator()
    for ell in range(s + 1):
        via_p = via_p + (PHAT ** (s - ell) * XHAT**r * PHAT**ell).scale(p_weights[ell])
    via_x = NormalOperator()
    for ell in range(r + 1):
        via_x = via_x + (XHAT**ell * PHAT**s * XHAT ** (r - ell)).scale(x_weights[ell])
    if via_p != via_x:
        raise ConsistencyError(f"the two average forms disagree for r={r}, s={s}")
    return via_p


def op_w_average(r: int, s: int) -> NormalOperator:
    p_w = [Fraction(comb(s, ell), 2**s) for ell in range(s + 1)]
    x_w = [Fraction(comb(r, ell), 2**r) for ell in range(r + 1)]
    return _average(r, s, p_w, x_w)


def op_bj_average(r: int, s: int) -> NormalOperator:
    p_w = [Fraction(1, s + 1)] * (s + 1)
    x_w = [Fraction(1, r + 1)] * (r + 1)
    return _average(r, s, p_w, x_w)


_MONOMIAL = {Scheme.WEYL: op_w_monomial, Scheme.BORN_JORDAN: op_bj_monomial}


def quantize(a: PolySymbol, scheme: Scheme) -> NormalOperator:
    mono = _MONOMIAL[Scheme(scheme)]
    out = NormalOperator()
    for (r, s), c in a.terms.items():
        out = out + mono(r, s).scale(c)
    return out


def dequantize(op: NormalOperator, scheme: Scheme) -> PolySymbol:
    """Unique polynomial symbol whose quantization is ``op``.

    Each quantized monomial is ``X^r P^s`` plus strictly lower-degree terms,
    so peeling off the top-degree part repeatedly terminates.
    """
    mono = _MONOMIAL[Scheme(scheme)]
    remainder = op
    symbol = {}
    while remainder:
        top = remainder.degree
        for (r, s), c in remainder.terms.items():
            if r + s == top:
                symbol[(r, s)] = c
                remainder = remainder - mono(r, s).scale(c)
    return PolySymbol(symbol)


def _series_map(a: PolySymbol, coeff) -> PolySymbol:
    quarter_hbar2 = HBAR**2 * Fraction(1, 4)
    out = {}
    for (r, s), c in a.terms.items():
        for k in range(min(r, s) // 2 + 1):
            w = coeff(k) * Fraction(factorial(r) * factorial(s), factorial(r - 2 * k) * factorial(s - 2 * k))
            term = c * quarter_hbar2**k * w
            key = (r - 2 * k, s - 2 * k)
            out[key] = out[key] + term if key in out else term
    return PolySymbol(out)


def bj_to_weyl_poly(a: PolySymbol, verify: bool = False) -> PolySymbol:
    """Weyl symbol of ``Op_BJ(a)`` via the ``sin(t)/t`` series."""
    b = _series_map(a, theta_series_coeff)
    if verify and b != dequantize(quantize(a, Scheme.BORN_JORDAN), Scheme.WEYL):
        raise ConsistencyError("series map disagrees with quantize/dequantize")
    return b


def weyl_to_bj_poly(b: PolySymbol, verify: bool = False) -> PolySymbol:
    """Born-Jordan symbol of ``Op_W(b)`` via the ``t/sin(t)`` series."""
    a = _series_map(b, theta_inv_series_coeff)
    if verify and a != dequantize(quantize(b, Scheme.WEYL), Scheme.BORN_JORDAN):
        raise ConsistencyError("series map disagrees with quantize/dequantize")
    return a


def convert(a: PolySymbol, source: Scheme, target: Scheme) -> PolySymbol:
    source, target = Scheme(source), Scheme(target)
    if source == target:
        return a
    if source == Scheme.BORN_JORDAN:
        return bj_to_weyl_poly(a)
    return weyl_to_bj_poly(a)


__all__ = [
    "ConsistencyError",
    "Scheme",
    "bj_to_weyl_poly",
    "convert",
    "dequantize",
    "op_bj_average",
    "op_bj_monomial",
    "op_w_average",
    "op_w_monomial",
    "quantize",
    "weyl_to_bj_poly",
]
