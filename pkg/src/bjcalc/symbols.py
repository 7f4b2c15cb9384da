"""Commutative polynomial symbols ``a(x, p)`` in one degree of freedom."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .scalars import ExactScalar, Number

Monomial = tuple[int, int]


class _TermMap:
    """Finite map ``(r, s) -> ExactScalar`` in canonical form.

    Shared storage for commutative symbols and normal-ordered operators; the
    subclasses only differ in how two monomials multiply.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean: dict[Monomial, ExactScalar] = {}
        if terms:
            for (r, s), c in terms.items():
                if r < 0 or s < 0:
                    raise ValueError(f"negative exponent in monomial {(r, s)}")
                c = ExactScalar.coerce(c)
                if c:
                    key = (int(r), int(s))
                    if key in clean:
                        c = clean[key] + c
                        if not c:
                            del clean[key]
                            continue
                    clean[key] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def constant(cls, c: Number):
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, r: int, s: int, c: Number = 1):
        return cls({(r, s): c})

    @property
    def terms(self) -> dict[Monomial, ExactScalar]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, ExactScalar]]:
        """Terms in graded-lexicographic descending order."""
        return iter(sorted(self._terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])))

    def coefficient(self, r: int, s: int) -> ExactScalar:
        return self._terms.get((r, s), ExactScalar())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero element."""
        return max((r + s for r, s in self._terms), default=-1)

    def _same(self, other) -> bool:
        return type(other) is type(self)

    def _coerce(self, other):
        if self._same(other):
            return other
        if isinstance(other, _TermMap):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        return type(self).constant(ExactScalar.coerce(other))

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out[k] + c if k in out else c
        return type(self)(out)

    __radd__ = __add__

    def __neg__(self):
        return type(self)({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c: Number):
        c = ExactScalar.coerce(c)
        return type(self)({k: c * v for k, v in self._terms.items()})

    def _monomial_product(self, a: Monomial, b: Monomial) -> Iterable[tuple[Monomial, ExactScalar]]:
        raise NotImplementedError

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        if not self._same(other):
            return NotImplemented
        out: dict[Monomial, ExactScalar] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                c12 = c1 * c2
                for m, w in self._monomial_product(m1, m2):
                    v = c12 * w if w != 1 else c12
                    out[m] = out[m] + v if m in out else v
        return type(self)(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = type(self).constant(1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if self._same(other):
            return self._terms == other._terms
        if isinstance(other, _TermMap):
            return False
        try:
            return self == type(self).constant(ExactScalar.coerce(other))
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._terms.items())))
        return self._hash


class PolySymbol(_TermMap):
    """Element of the commutative ring C[x, p] with coefficients in ``ExactScalar``."""

    __slots__ = ()

    def _monomial_product(self, a, b):
        return (((a[0] + b[0], a[1] + b[1]), 1),)

    def __repr__(self):
        from .text import print_symbol

        return f"PolySymbol({print_symbol(self)!r})"

    def __str__(self):
        from .text import print_symbol

        return print_symbol(self)


X = PolySymbol.monomial(1, 0)
P = PolySymbol.monomial(0, 1)


def poly_add(a: PolySymbol, b: PolySymbol) -> PolySymbol:
    return a + b


def poly_mul(a: PolySymbol, b: PolySymbol) -> PolySymbol:
    return a * b
