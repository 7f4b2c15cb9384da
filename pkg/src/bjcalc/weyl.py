"""The Weyl algebra C[X, P] with [X, P] = i hbar, kept in X-before-P normal order."""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from .scalars import HBAR, I, ExactScalar
from .symbols import _TermMap


@lru_cache(maxsize=None)
def _minus_i_hbar_power(ell: int) -> ExactScalar:
    return (-I * HBAR) ** ell


@lru_cache(maxsize=4096)
def _swap(b: int, c: int) -> tuple[tuple[int, ExactScalar], ...]:
    """``P^b X^c = sum_l C(b,l) C(c,l) l! (-i hbar)^l X^(c-l) P^(b-l)``."""
    return tuple(
        (ell, _minus_i_hbar_power(ell) * (comb(b, ell) * comb(c, ell) * factorial(ell)))
        for ell in range(min(b, c) + 1)
    )


class NormalOperator(_TermMap):
    """Normal-ordered element ``sum c_rs X^r P^s`` of the Weyl algebra."""

    __slots__ = ()

    def _monomial_product(self, a, b):
        # X^r P^s X^t P^u
        r, s = a
        t, u = b
        if s == 0 or t == 0:
            return (((r + t, s + u), 1),)
        return tuple(((r + t - ell, s + u - ell), w) for ell, w in _swap(s, t))

    def __repr__(self):
        from .text import print_operator

        return f"NormalOperator({print_operator(self)!r})"

    def __str__(self):
        from .text import print_operator

        return print_operator(self)


XHAT = NormalOperator.monomial(1, 0)
PHAT = NormalOperator.monomial(0, 1)


def op_mul(a: NormalOperator, b: NormalOperator) -> NormalOperator:
    return a * b


def commutator(a: NormalOperator, b: NormalOperator) -> NormalOperator:
    return a * b - b * a
