"""Exponential-polynomial symbols ``P(z) exp((i/hbar) sigma(z0, z))`` and their delta jets.

The symplectic Fourier transform sends such a symbol to a finite combination
of derivatives of a Dirac mass at ``z0``; on that side the Born-Jordan to Weyl
map is multiplication by Theta, which the Leibniz rule turns into finite
linear algebra on jet coefficients.

Multi-indices run over ``(x_1..x_n, p_1..p_n)``; polynomial exponents use the
same ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import numpy as np

from .theta import PhasePoint, ThetaContext, sinc_derivatives, theta, theta_gradient

Index = tuple[int, ...]

# |Theta(z0)| at or below this is treated as a zero of Theta
ZERO_TOL = 1e-10
RESIDUAL_TOL = 1e-10
SINGULAR_CUTOFF = 1e-12


class JetDivisionError(ArithmeticError):
    pass


def _z0_array(z0) -> np.ndarray:
    z0 = np.asarray(z0.z if isinstance(z0, PhasePoint) else z0, dtype=float)
    if z0.ndim != 1 or z0.size % 2 or not np.all(np.isfinite(z0)):
        raise ValueError("z0 must be a finite vector of even length")
    return z0


@dataclass
class ExpPolyTerm:
    """``poly(z) * exp((i/hbar) sigma(z0, z))`` with ``poly`` a dict exponent -> complex."""

    z0: np.ndarray
    poly: dict[Index, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.z0 = _z0_array(self.z0)
        d = self.z0.size
        clean = {}
        for e, c in self.poly.items():
            e = tuple(int(k) for k in e)
            if len(e) != d or min(e, default=0) < 0:
                raise ValueError(f"exponent {e} does not match dimension {d}")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("coefficients must be finite")
            if c != 0:
                clean[e] = clean.get(e, 0) + c
        self.poly = clean

    @property
    def n(self) -> int:
        return self.z0.size // 2

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.poly), default=-1)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for c in self.poly.values()), default=0.0)

    def evaluate(self, ctx: ThetaContext, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        n = self.n
        x, p = z[..., :n], z[..., n:]
        x0, p0 = self.z0[:n], self.z0[n:]
        sigma = np.sum(p0 * x, axis=-1) - np.sum(x0 * p, axis=-1)
        val = np.zeros(z.shape[:-1], dtype=complex)
        for e, c in self.poly.items():
            val = val + c * np.prod(z ** np.asarray(e), axis=-1)
        return val * np.exp(1j * sigma / ctx.hbar)


@dataclass
class DeltaJet:
    """``sum_alpha d_alpha (d/dz)^alpha delta(z - z0)``."""

    z0: np.ndarray
    coeffs: dict[Index, complex] = field(default_factory=dict)

    def __post_init__(self):
        self.z0 = _z0_array(self.z0)
        self.coeffs = {tuple(int(k) for k in a): complex(c) for a, c in self.coeffs.items() if c != 0}

    @property
    def order(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def pair(self, derivative) -> complex:
        """``<jet, phi>`` given ``derivative(alpha) = (d^alpha phi)(z0)``."""
        return sum(c * (-1) ** sum(a) * derivative(a) for a, c in self.coeffs.items())


# multi-index helpers ---------------------------------------------------------


def multi_indices(dim: int, order: int) -> list[Index]:
    """All ``alpha`` with ``|alpha| <= order``, graded."""
    out = [a for a in product(range(order + 1), repeat=dim) if sum(a) <= order]
    out.sort(key=lambda a: (sum(a), tuple(-k for k in a)))
    return out


def _leq(b: Index, a: Index) -> bool:
    return all(bi <= ai for bi, ai in zip(b, a))


def _sub(a: Index, b: Index) -> Index:
    return tuple(ai - bi for ai, bi in zip(a, b))


def _factorial(a: Index) -> int:
    return math.prod(math.factorial(k) for k in a)


def _poly_mul(a: dict, b: dict, max_degree: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > max_degree:
                continue
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


# Taylor expansion of Theta ---------------------------------------------------


def theta_taylor(ctx: ThetaContext, z0, order: int) -> dict[Index, float]:
    """Taylor coefficients ``(d^alpha Theta)(z0) / alpha!`` for ``|alpha| <= order``.

    ``Theta(z0 + h) = S(t0 + dt)`` with the quadratic increment
    ``dt = (x0.h_p + h_x.p0 + h_x.h_p) / 2 hbar``; expanding ``S`` to ``order``
    terms and truncating powers of ``dt`` is the whole chain rule.
    """
    z0 = _z0_array(z0)
    n = z0.size // 2
    if n != ctx.n:
        raise ValueError("z0 dimension does not match the context")
    d = 2 * n
    x0, p0 = z0[:n], z0[n:]
    t0 = float(np.dot(x0, p0)) / (2 * ctx.hbar)
    scale = 1.0 / (2 * ctx.hbar)

    def unit(*idx):
        e = [0] * d
        for i in idx:
            e[i] += 1
        return tuple(e)

    dt: dict[Index, float] = {}
    for j in range(n):
        for e, c in ((unit(n + j), x0[j]), (unit(j), p0[j]), (unit(j, n + j), 1.0)):
            if c:
                dt[e] = dt.get(e, 0.0) + c * scale
    derivs = sinc_derivatives(t0, order)
    out: dict[Index, float] = {}
    power: dict[Index, float] = {(0,) * d: 1.0}
    for j in range(order + 1):
        w = derivs[j] / math.factorial(j)
        for e, c in power.items():
            out[e] = out.get(e, 0.0) + w * c
        power = _poly_mul(power, dt, order)
    return out


def _taylor_reciprocal(taylor: dict[Index, float], dim: int, order: int) -> dict[Index, complex]:
    t0 = taylor.get((0,) * dim, 0.0)
    if t0 == 0:
        raise ZeroDivisionError("Taylor series has zero constant term")
    recip: dict[Index, complex] = {}
    for a in multi_indices(dim, order):
        if sum(a) == 0:
            recip[a] = 1 / t0
            continue
        acc = 0.0
        for b, tb in taylor.items():
            if sum(b) and _leq(b, a):
                acc += tb * recip[_sub(a, b)]
        recip[a] = -acc / t0
    return recip


def multiply_jet(taylor: dict[Index, complex], jet: DeltaJet) -> DeltaJet:
    """``f * jet`` for a smooth ``f`` given by its Taylor coefficients at ``jet.z0``.

    ``f d^alpha delta = sum_(beta<=alpha) (-1)^|beta| C(alpha,beta) (d^beta f)(z0) d^(alpha-beta) delta``.
    """
    out: dict[Index, complex] = {}
    for a, c in jet.coeffs.items():
        fa = _factorial(a)
        for b, tb in taylor.items():
            if not _leq(b, a):
                continue
            rest = _sub(a, b)
            # C(alpha, beta) beta! = alpha! / (alpha - beta)!
            w = (-1) ** sum(b) * fa / _factorial(rest) * tb
            out[rest] = out.get(rest, 0) + w * c
    return DeltaJet(jet.z0, out)


def multiply_theta_jet(ctx: ThetaContext, jet: DeltaJet) -> DeltaJet:
    return multiply_jet(theta_taylor(ctx, jet.z0, jet.order), jet)


# symbol <-> jet ------------------------------------------------------------


def _jet_weight(ctx: ThetaContext, e: Index) -> complex:
    """``d_alpha / P_e`` for the monomial ``z^e``; ``alpha`` swaps the x and p halves of ``e``."""
    n = len(e) // 2
    beta = sum(e[:n])
    return (2 * math.pi * ctx.hbar) ** n * (-1) ** beta * (-1j * ctx.hbar) ** sum(e)


def _swap_halves(e: Index) -> Index:
    n = len(e) // 2
    return e[n:] + e[:n]


def to_jet(term: ExpPolyTerm, ctx: ThetaContext) -> DeltaJet:
    """Symplectic Fourier transform of ``term``: ``exp`` alone maps to ``(2 pi hbar)^n delta(z - z0)``."""
    return DeltaJet(term.z0, {_swap_halves(e): c * _jet_weight(ctx, e) for e, c in term.poly.items()})


def from_jet(jet: DeltaJet, ctx: ThetaContext) -> ExpPolyTerm:
    poly = {}
    for a, c in jet.coeffs.items():
        e = _swap_halves(a)
        poly[e] = c / _jet_weight(ctx, e)
    return ExpPolyTerm(jet.z0, poly)


# maps on sums of terms -----------------------------------------------------


def _group(terms: Iterable[ExpPolyTerm]) -> list[ExpPolyTerm]:
    groups: dict[tuple, ExpPolyTerm] = {}
    for t in terms:
        key = tuple(t.z0.tolist())
        if key in groups:
            merged = dict(groups[key].poly)
            for e, c in t.poly.items():
                merged[e] = merged.get(e, 0) + c
            groups[key] = ExpPolyTerm(t.z0, merged)
        else:
            groups[key] = t
    return list(groups.values())


def bj_to_weyl_exp(ctx: ThetaContext, terms: Iterable[ExpPolyTerm]) -> list[ExpPolyTerm]:
    """Weyl symbol of the Born-Jordan operator with symbol ``sum(terms)``."""
    out = []
    for t in _group(terms):
        image = from_jet(multiply_theta_jet(ctx, to_jet(t, ctx)), ctx)
        if image.poly:
            out.append(image)
    return out


def _divide_at_zero(ctx: ThetaContext, jet: DeltaJet, order: int) -> DeltaJet:
    dim = jet.z0.size
    idx = multi_indices(dim, order)
    pos = {a: i for i, a in enumerate(idx)}
    taylor = theta_taylor(ctx, jet.z0, order)
    M = np.zeros((len(idx), len(idx)), dtype=complex)
    for j, a in enumerate(idx):
        col = multiply_jet(taylor, DeltaJet(jet.z0, {a: 1.0}))
        for b, v in col.coeffs.items():
            M[pos[b], j] = v
    rhs = np.zeros(len(idx), dtype=complex)
    for a, c in jet.coeffs.items():
        if a not in pos:
            raise JetDivisionError(f"jet order exceeds max_order={order}")
        rhs[pos[a]] = c
    # minimal-norm least squares; the cutoff is floored at an absolute scale so
    # that a lone tiny singular value (Theta(z0) itself at order 0) counts as zero
    U, sv, Vh = np.linalg.svd(M)
    keep = sv > SINGULAR_CUTOFF * max(1.0, sv[0])
    sol = Vh[keep].conj().T @ ((U[:, keep].conj().T @ rhs) / sv[keep])
    residual = np.linalg.norm(M @ sol - rhs)
    if residual > RESIDUAL_TOL * max(1.0, np.linalg.norm(rhs)):
        raise JetDivisionError(
            f"jet division at z0={jet.z0.tolist()} left residual {residual:.3e} at order {order}; "
            "retry with a higher max_order"
        )
    return DeltaJet(jet.z0, {a: sol[i] for i, a in enumerate(idx)})


def divide_theta_jet(ctx: ThetaContext, jet: DeltaJet, max_order: int | None = None) -> DeltaJet:
    """A jet ``a`` with ``Theta * a = jet``.

    Off the zero set this is multiplication by the Taylor reciprocal of Theta.
    At a (simple) zero the order rises by one and the minimal-norm solution of
    the jet equations is returned.
    """
    if not jet.coeffs:
        return DeltaJet(jet.z0, {})
    m = jet.order
    th = float(theta(ctx, jet.z0))
    if abs(th) > ZERO_TOL:
        order = m if max_order is None else max(m, max_order)
        recip = _taylor_reciprocal(theta_taylor(ctx, jet.z0, order), jet.z0.size, order)
        return multiply_jet(recip, jet)
    return _divide_at_zero(ctx, jet, m + 1 if max_order is None else max_order)


def weyl_to_bj_exp(ctx: ThetaContext, terms: Iterable[ExpPolyTerm], max_order: int | None = None) -> list[ExpPolyTerm]:
    """A Born-Jordan symbol whose operator has Weyl symbol ``sum(terms)``."""
    out = []
    for t in _group(terms):
        if not t.poly:
            continue
        jet = divide_theta_jet(ctx, to_jet(t, ctx), max_order)
        out.append(from_jet(jet, ctx))
    return out


def solve_heisenberg_bj(ctx: ThetaContext, z0) -> ExpPolyTerm:
    """Born-Jordan symbol of the Heisenberg operator ``T(z0)``.

    Off the zero set: ``exp(...) / Theta(z0)``.  On it the solution is not
    unique (any multiple of ``exp(...)`` can be added); by convention we return
    the minimal-norm ``c = -grad Theta(z0) / |grad Theta(z0)|^2``, giving
    ``(i/hbar) sigma(z, c) exp(...)``.
    """
    z0 = _z0_array(z0)
    n = ctx.n
    th = float(theta(ctx, z0))
    if abs(th) > ZERO_TOL:
        return ExpPolyTerm(z0, {(0,) * (2 * n): 1 / th})
    g = theta_gradient(ctx, z0)
    c = -g / np.dot(g, g)
    # sigma(z, c) = p.c_x - x.c_p
    poly = {}
    for j in range(n):
        ex = [0] * (2 * n)
        ex[j] = 1
        ep = [0] * (2 * n)
        ep[n + j] = 1
        poly[tuple(ep)] = 1j / ctx.hbar * c[j]
        poly[tuple(ex)] = -1j / ctx.hbar * c[n + j]
    return ExpPolyTerm(z0, poly)


def heisenberg_symbol(ctx: ThetaContext, z0) -> ExpPolyTerm:
    """Weyl symbol ``exp((i/hbar) sigma(z0, z))`` of ``T(z0)``."""
    return ExpPolyTerm(_z0_array(z0), {(0,) * (2 * ctx.n): 1.0})


def kernel_witness(ctx: ThetaContext, r: float) -> ExpPolyTerm | None:
    """A non-zero symbol in ``A_r`` mapped to zero, or ``None`` when ``r < sqrt(4 pi hbar)``."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if r < ctx.threshold:
        return None
    v = math.sqrt(2 * math.pi * ctx.hbar / ctx.n)
    return heisenberg_symbol(ctx, np.full(2 * ctx.n, v))


# text ------------------------------------------------------------------------


def format_number(v: float, precision: int = 12) -> str:
    s = f"{v:.{precision}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _format_complex(c: complex, precision: int) -> str:
    re_, im = format_number(c.real, precision), format_number(c.imag, precision)
    if im == "0":
        return re_
    if re_ == "0":
        return {"1": "i", "-1": "-i"}.get(im, f"{im} i")
    sign = "-" if im.startswith("-") else "+"
    mag = im.lstrip("-")
    return f"({re_} {sign} {'' if mag == '1' else mag + ' '}i)"


def format_exp_term(term: ExpPolyTerm, precision: int = 12) -> str:
    """``<poly> exp(i/hbar*sigma([x0,p0],z))``; the exponential is omitted at ``z0 = 0``."""
    n = term.n
    names = ["x", "p"] if n == 1 else [f"x{j + 1}" for j in range(n)] + [f"p{j + 1}" for j in range(n)]
    pieces = []
    for e in sorted(term.poly, key=lambda e: (-sum(e), tuple(-k for k in e))):
        coeff = _format_complex(term.poly[e], precision)
        if coeff == "0":
            continue
        mono = " ".join(nm if k == 1 else f"{nm}^{k}" for nm, k in zip(names, e) if k)
        if mono:
            coeff = "" if coeff == "1" else ("-" if coeff == "-1" else coeff + " ")
            pieces.append(f"{coeff}{mono}")
        else:
            pieces.append(coeff)
    poly = " + ".join(pieces).replace("+ -", "- ") if pieces else "0"
    if not np.any(term.z0) or poly == "0":
        return poly
    zs = ",".join(format_number(v, precision) for v in term.z0)
    expo = f"exp(i/hbar*sigma([{zs}],z))"
    if poly == "1":
        return expo
    if len(pieces) > 1:
        poly = f"({poly})"
    return f"{poly} {expo}"
