"""Text grammar for symbols and operators.

Symbols use commuting variables ``x`` and ``p``; operators use ``X`` and ``P``
and treat juxtaposition as ordered composition.  Both share one lexical
layer::

    symbol   := [sign] term (('+' | '-') term)*
    term     := factor+
    factor   := rational | 'i' | 'hbar' ('^' int)? | var ('^' uint)? | '(' symbol ')'
    rational := uint ('/' uint)?

A leading sign is accepted so that printed text always parses back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .scalars import HBAR, I, ExactScalar
from .symbols import PolySymbol, _TermMap
from .weyl import NormalOperator


class ParseError(ValueError):
    """Syntax error with 1-based position and the set of acceptable tokens."""

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += " (expected one of: " + ", ".join(sorted(expected)) + ")"
        super().__init__(detail)


class NegativeExponentError(ParseError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"\s+|\d+|[A-Za-z]+|[()+\-/^]|.", re.S)
_PUNCT = {"(", ")", "+", "-", "/", "^"}


def _tokenize(text: str, variables: tuple[str, str]) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        s = m.group()
        if s.isspace():
            pass
        elif s.isdigit():
            tokens.append(_Token("int", s, line, col))
        elif s in _PUNCT:
            tokens.append(_Token(s, s, line, col))
        elif s.isalpha():
            # juxtaposed names such as "xp" or "ihbar" are split greedily
            k = 0
            while k < len(s):
                name = "hbar" if s.startswith("hbar", k) else s[k]
                if name != "hbar" and name != "i" and name not in variables:
                    raise ParseError(f"unknown identifier {s[k:]!r}", line, col + k, _factor_starts(variables))
                tokens.append(_Token(name, name, line, col + k))
                k += len(name)
        else:
            raise ParseError(f"unexpected character {s!r}", line, col, _factor_starts(variables))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
    tokens.append(_Token("end", "", line, col))
    return tokens


def _factor_starts(variables) -> frozenset[str]:
    return frozenset({"integer", "i", "hbar", "(", *variables})


class _Parser:
    def __init__(self, text: str, cls: type[_TermMap], variables: tuple[str, str]):
        self.cls = cls
        self.variables = variables
        self.tokens = _tokenize(text, variables)
        self.pos = 0
        self.generators = {
            variables[0]: cls.monomial(1, 0),
            variables[1]: cls.monomial(0, 1),
        }

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _error(self, expected, message=None):
        t = self.tok
        shown = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(message or f"unexpected {shown}", t.line, t.column, frozenset(expected))

    def _advance(self) -> _Token:
        t = self.tok
        self.pos += 1
        return t

    def parse(self):
        value = self.symbol()
        if self.tok.kind != "end":
            self._error({"+", "-", "end of input"} | _factor_starts(self.variables))
        return value

    def symbol(self):
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self._advance().kind == "-" else 1
        value = self.term()
        if sign < 0:
            value = -value
        while self.tok.kind in ("+", "-"):
            op = self._advance().kind
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _starts_factor(self) -> bool:
        return self.tok.kind in ("int", "i", "hbar", "(") or self.tok.kind in self.variables

    def term(self):
        if not self._starts_factor():
            self._error(_factor_starts(self.variables))
        value = self.factor()
        while self._starts_factor():
            value = value * self.factor()
        return value

    def _exponent(self, signed: bool) -> int:
        self._advance()  # '^'
        sign = 1
        t = self.tok
        if t.kind == "-":
            self._advance()
            sign = -1
        elif t.kind == "+":
            self._advance()
        if self.tok.kind != "int":
            self._error({"integer"})
        k = sign * int(self._advance().text)
        if k < 0 and not signed:
            raise NegativeExponentError(f"negative exponent {k} on a phase-space variable", t.line, t.column)
        return k

    def factor(self):
        t = self.tok
        cls = self.cls
        if t.kind == "int":
            self._advance()
            num = int(t.text)
            den = 1
            if self.tok.kind == "/":
                self._advance()
                if self.tok.kind != "int":
                    self._error({"integer"})
                d = self._advance()
                den = int(d.text)
                if den == 0:
                    raise ParseError("zero denominator", d.line, d.column)
            return cls.constant(Fraction(num, den))
        if t.kind == "i":
            self._advance()
            return cls.constant(I)
        if t.kind == "hbar":
            self._advance()
            k = self._exponent(signed=True) if self.tok.kind == "^" else 1
            return cls.constant(HBAR**k)
        if t.kind in self.variables:
            self._advance()
            k = self._exponent(signed=False) if self.tok.kind == "^" else 1
            return self.generators[t.kind] ** k
        if t.kind == "(":
            self._advance()
            value = self.symbol()
            if self.tok.kind != ")":
                self._error({")", "+", "-"} | _factor_starts(self.variables))
            self._advance()
            return value
        self._error(_factor_starts(self.variables))


def parse_symbol(text: str) -> PolySymbol:
    return _Parser(text, PolySymbol, ("x", "p")).parse()


def parse_operator(text: str) -> NormalOperator:
    return _Parser(text, NormalOperator, ("X", "P")).parse()


# printing -----------------------------------------------------------------


def _rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _power(name: str, k: int) -> str:
    return name if k == 1 else f"{name}^{k}"


def _format_terms(value: _TermMap, names: tuple[str, str]) -> str:
    pieces: list[tuple[int, str]] = []
    for (r, s), coeff in value.items():
        for e, (re_, im) in sorted(coeff.terms.items(), key=lambda kv: -kv[0]):
            factors = []
            if e:
                factors.append(_power("hbar", e))
            if r:
                factors.append(_power(names[0], r))
            if s:
                factors.append(_power(names[1], s))
            if im == 0:
                sign, lead = (1 if re_ > 0 else -1), ([] if abs(re_) == 1 and factors else [_rat(abs(re_))])
            elif re_ == 0:
                sign = 1 if im > 0 else -1
                lead = ["i"] if abs(im) == 1 else [_rat(abs(im)), "i"]
            else:
                imag = f"{'+' if im > 0 else '-'} {'' if abs(im) == 1 else _rat(abs(im)) + ' '}i"
                sign, lead = 1, [f"({_rat(re_)} {imag})"]
            pieces.append((sign, " ".join(lead + factors)))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def print_symbol(a: PolySymbol) -> str:
    return _format_terms(a, ("x", "p"))


def print_operator(a: NormalOperator) -> str:
    return _format_terms(a, ("X", "P"))


def format_scalar(c: ExactScalar) -> str:
    return _format_terms(PolySymbol.constant(c), ("x", "p"))

