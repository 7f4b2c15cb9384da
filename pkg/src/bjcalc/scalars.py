"""Exact scalars: Gaussian rationals times Laurent polynomials in a symbolic hbar.

Also home to the Bernoulli numbers and the two even power series that drive
the Born-Jordan/Weyl symbol maps: ``sin(t)/t`` and its reciprocal ``t/sin(t)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Mapping, Union

Rational = Fraction

_ZERO = Fraction(0)

Number = Union[int, Fraction, "ExactScalar"]


class ExactScalar:
    """Finite sum ``sum_e (re_e + i im_e) hbar^e`` with rational re/im parts.

    Instances are immutable and kept canonical: no stored coefficient is zero,
    so structural equality is mathematical equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, tuple[Fraction, Fraction]] | None = None):
        clean = {}
        if terms:
            for e, (re, im) in terms.items():
                re, im = Fraction(re), Fraction(im)
                if re or im:
                    clean[int(e)] = (re, im)
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def coerce(cls, value: Number) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls({0: (Fraction(value), _ZERO)})
        raise TypeError(f"cannot convert {type(value).__name__} to ExactScalar")

    @classmethod
    def gaussian(cls, re, im=0, hbar_power: int = 0) -> "ExactScalar":
        return cls({hbar_power: (Fraction(re), Fraction(im))})

    # inspection ---------------------------------------------------------

    @property
    def terms(self) -> dict[int, tuple[Fraction, Fraction]]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, tuple[Fraction, Fraction]]]:
        return iter(sorted(self._terms.items()))

    def is_zero(self) -> bool:
        return not self._terms

    def hbar_degrees(self) -> set[int]:
        return set(self._terms)

    def coefficient(self, e: int) -> tuple[Fraction, Fraction]:
        return self._terms.get(e, (_ZERO, _ZERO))

    def __bool__(self):
        return bool(self._terms)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for e, (re, im) in other._terms.items():
            r0, i0 = out.get(e, (_ZERO, _ZERO))
            out[e] = (r0 + re, i0 + im)
        return ExactScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar({e: (-re, -im) for e, (re, im) in self._terms.items()})

    def __sub__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ExactScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[int, tuple[Fraction, Fraction]] = {}
        for e1, (a, b) in self._terms.items():
            for e2, (c, d) in other._terms.items():
                r0, i0 = out.get(e1 + e2, (_ZERO, _ZERO))
                out[e1 + e2] = (r0 + a * c - b * d, i0 + a * d + b * c)
        return ExactScalar(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            # only monomials are invertible in this ring
            if len(self._terms) != 1:
                raise ZeroDivisionError("only single-power scalars can be inverted")
            (e, (a, b)), = self._terms.items()
            den = a * a + b * b
            inv = ExactScalar({-e: (a / den, -b / den)})
            return inv ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "ExactScalar":
        return ExactScalar({e: (re, -im) for e, (re, im) in self._terms.items()})

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        try:
            other = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "ExactScalar(0)"
        parts = []
        for e, (re, im) in self.items():
            parts.append(f"({re}+{im}i)*hbar^{e}")
        return "ExactScalar(" + " + ".join(parts) + ")"

    def evaluate(self, hbar: float) -> complex:
        """Numeric value at a concrete ``hbar``."""
        return sum(complex(float(re), float(im)) * hbar**e for e, (re, im) in self._terms.items())


ZERO = ExactScalar()
ONE = ExactScalar.gaussian(1)
I = ExactScalar.gaussian(0, 1)
HBAR = ExactScalar.gaussian(1, 0, 1)


@lru_cache(maxsize=None)
def _bernoulli_plus(m: int) -> Fraction:
    # Akiyama-Tanigawa; yields B_1 = +1/2
    a = [Fraction(1, j + 1) for j in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(m - i + 1):
            a[j] = (j + 1) * (a[j] - a[j + 1])
    return a[0]


def bernoulli(m: int) -> Fraction:
    """Bernoulli number ``B_m`` with ``B_1 = -1/2``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 1:
        return Fraction(-1, 2)
    if m > 1 and m % 2:
        return Fraction(0)
    return _bernoulli_plus(m)


def theta_series_coeff(k: int) -> Fraction:
    """Coefficient of ``t^(2k)`` in ``sin(t)/t``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return Fraction((-1) ** k, factorial(2 * k + 1))


def theta_inv_series_coeff(k: int) -> Fraction:
    """Coefficient ``a_k`` of ``t^(2k)`` in ``t/sin(t)``.

    ``a_k = (-1)^(k-1) (2^(2k) - 2) B_(2k) / (2k)!``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    sign = -1 if k % 2 == 0 else 1
    return sign * (2 ** (2 * k) - 2) * bernoulli(2 * k) / factorial(2 * k)
