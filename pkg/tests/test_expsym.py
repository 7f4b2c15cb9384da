import math

import mpmath
import numpy as np
import pytest
import sympy as sp

from bjcalc.expsym import (
    DeltaJet,
    ExpPolyTerm,
    JetDivisionError,
    bj_to_weyl_exp,
    divide_theta_jet,
    format_exp_term,
    format_number,
    from_jet,
    heisenberg_symbol,
    kernel_witness,
    multi_indices,
    multiply_theta_jet,
    solve_heisenberg_bj,
    theta_taylor,
    to_jet,
    weyl_to_bj_exp,
)
from bjcalc.quantize import bj_to_weyl_poly
from bjcalc.symbols import P, X
from bjcalc.theta import ThetaContext, theta, witness_point

xs, ps = sp.symbols("x p")


def _to_sympy(poly):
    return sum(sp.nsimplify(0) + complex(c) * xs ** e[0] * ps ** e[1] for e, c in poly.items())


def _from_sympy(expr):
    expr = sp.expand(expr)
    out = {}
    for (i, j), c in sp.Poly(expr, xs, ps).terms():
        out[(i, j)] = complex(c)
    return out


def _bj_to_weyl_oracle(hbar, z0, poly):
    """Apply ``sinc(hbar d_x d_p / 2)`` to ``poly(z) exp((i/hbar)(p0 x - x0 p))`` for n = 1.

    Pulling the exponential through the derivatives leaves ``t0 + N`` with the
    scalar ``t0 = x0 p0 / 2 hbar`` and the nilpotent operator
    ``N f = (hbar/2)(f_xp - i (x0/hbar) f_x + i (p0/hbar) f_p)``.
    """
    x0, p0 = z0
    a, b = p0 / hbar, x0 / hbar
    t0 = x0 * p0 / (2 * hbar)
    f = _to_sympy(poly)
    total = 0
    j = 0
    while f != 0:
        dj = float(mpmath.diff(mpmath.sinc, mpmath.mpf(t0), j))
        total += dj / math.factorial(j) * f
        f = sp.expand(hbar / 2 * (sp.diff(f, xs, ps) - 1j * b * sp.diff(f, xs) + 1j * a * sp.diff(f, ps)))
        j += 1
    return _from_sympy(total)


def _max_diff(a, b):
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), default=0.0)


def _random_poly(rng, dim, degree):
    return {e: complex(*rng.normal(size=2)) for e in multi_indices(dim, degree)}


# construction and formatting -----------------------------------------------------


def test_term_validation():
    t = ExpPolyTerm([1.0, 2.0], {(0, 0): 1, (1, 0): 0})
    assert t.poly == {(0, 0): 1}
    assert t.degree == 0
    with pytest.raises(ValueError):
        ExpPolyTerm([1.0, 2.0], {(1,): 1})
    with pytest.raises(ValueError):
        ExpPolyTerm([1.0, 2.0, 3.0], {})


def test_evaluate_is_plane_wave():
    ctx = ThetaContext(hbar=0.5)
    t = ExpPolyTerm([1.0, 2.0], {(1, 0): 2.0})
    z = np.array([0.3, -0.4])
    sigma = 2.0 * 0.3 - 1.0 * (-0.4)
    assert t.evaluate(ctx, z) == pytest.approx(2 * 0.3 * np.exp(1j * sigma / 0.5))


def test_format():
    assert format_number(-1e-17) == "0"
    assert format_number(2.5) == "2.5"
    assert format_number(1 / 3, 4) == "0.3333"
    t = ExpPolyTerm([0.0, 0.0], {(0, 0): 1.0})
    assert format_exp_term(t) == "1"
    t = ExpPolyTerm([1.0, -2.0], {(1, 0): 1j, (0, 0): -0.5})
    assert format_exp_term(t) == "(i x - 0.5) exp(i/hbar*sigma([1,-2],z))"
    t = ExpPolyTerm([1.0, 1.0, 0.0, 2.0], {(0, 0, 0, 0): 1 + 2j})
    assert format_exp_term(t) == "(1 + 2 i) exp(i/hbar*sigma([1,1,0,2],z))"
    assert format_exp_term(ExpPolyTerm([1.0, 1.0], {})) == "0"
    t = ExpPolyTerm([0.0, 0.0], {(0, 1): -1j, (0, 0): 2 - 1j})
    assert format_exp_term(t) == "-i p + (2 - i)"


# jets --------------------------------------------------------------------------


def test_jet_round_trip():
    rng = np.random.default_rng(0)
    ctx = ThetaContext(hbar=0.8, n=2)
    t = ExpPolyTerm(rng.normal(size=4), _random_poly(rng, 4, 3))
    back = from_jet(to_jet(t, ctx), ctx)
    assert _max_diff(back.poly, t.poly) < 1e-13


def test_taylor_matches_mpmath():
    mpmath.mp.dps = 30
    try:
        ctx = ThetaContext(hbar=0.7)
        z0 = (1.3, -2.1)
        tay = theta_taylor(ctx, z0, 5)
        f = lambda x, p: mpmath.sinc(x * p / (2 * mpmath.mpf(0.7)))
        for (i, j) in multi_indices(2, 5):
            ref = float(mpmath.diff(f, z0, (i, j))) / (math.factorial(i) * math.factorial(j))
            assert tay.get((i, j), 0.0) == pytest.approx(ref, rel=1e-10, abs=1e-12)
    finally:
        mpmath.mp.dps = 15


@pytest.mark.parametrize("seed", range(5))
def test_pairing_identity(seed):
    """``<Theta * jet, phi> = <jet, Theta phi>`` for smooth test functions."""
    rng = np.random.default_rng(seed)
    hbar = float(rng.uniform(0.3, 2.0))
    ctx = ThetaContext(hbar=hbar)
    z0 = rng.uniform(-3, 3, size=2)
    if seed == 0:
        z0 = witness_point(ctx).z
    jet = DeltaJet(z0, {a: complex(*rng.normal(size=2)) for a in multi_indices(2, 3)})
    w = rng.normal(size=3)

    def phi(x, p):
        return mpmath.exp(w[0] * x + w[1] * p) * (1 + w[2] * x * p)

    def theta_phi(x, p):
        return mpmath.sinc(x * p / (2 * hbar)) * phi(x, p)

    mpmath.mp.dps = 30
    try:
        lhs = multiply_theta_jet(ctx, jet).pair(lambda a: complex(mpmath.diff(phi, tuple(z0), a)))
        rhs = jet.pair(lambda a: complex(mpmath.diff(theta_phi, tuple(z0), a)))
    finally:
        mpmath.mp.dps = 15
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


# the symbol map ------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(6))
def test_bj_to_weyl_matches_differential_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    hbar = float(rng.uniform(0.2, 2.0))
    ctx = ThetaContext(hbar=hbar)
    z0 = rng.uniform(-4, 4, size=2)
    poly = _random_poly(rng, 2, 3)
    (image,) = bj_to_weyl_exp(ctx, [ExpPolyTerm(z0, poly)])
    assert _max_diff(image.poly, _bj_to_weyl_oracle(hbar, z0, poly)) <= 1e-10


def test_bj_to_weyl_at_origin_is_the_polynomial_map():
    ctx = ThetaContext(hbar=0.6)
    a = X**4 * P**2 + X * P**3
    exact = bj_to_weyl_poly(a)
    want = {k: c.evaluate(0.6) for k, c in exact.terms.items()}
    poly = {(r, s): 1.0 for (r, s) in a.terms}
    (image,) = bj_to_weyl_exp(ctx, [ExpPolyTerm([0.0, 0.0], poly)])
    assert _max_diff(image.poly, want) < 1e-13


def test_terms_with_equal_frequency_are_merged():
    ctx = ThetaContext()
    z0 = [0.5, 0.5]
    out = bj_to_weyl_exp(ctx, [ExpPolyTerm(z0, {(0, 0): 1}), ExpPolyTerm(z0, {(0, 0): -1})])
    assert out == []


def test_heisenberg_symbol_is_an_eigenvector():
    ctx = ThetaContext(hbar=1.3)
    z0 = [0.4, 2.0]
    (image,) = bj_to_weyl_exp(ctx, [heisenberg_symbol(ctx, z0)])
    assert image.poly == {(0, 0): pytest.approx(theta(ctx, z0))}


# kernel and division ---------------------------------------------------------------


@pytest.mark.parametrize("hbar, n", [(1.0, 1), (0.1, 1), (10.0, 1), (1.0, 2)])
def test_kernel_witness(hbar, n):
    ctx = ThetaContext(hbar=hbar, n=n)
    assert kernel_witness(ctx, 0.99 * ctx.threshold) is None
    w = kernel_witness(ctx, ctx.threshold)
    assert w is not None
    assert np.linalg.norm(w.z0) == pytest.approx(ctx.threshold, rel=1e-14)
    image = bj_to_weyl_exp(ctx, [w])
    assert all(t.max_abs_coefficient() <= 1e-14 for t in image)


def test_kernel_is_exactly_the_zero_set():
    ctx = ThetaContext(hbar=1.0)
    grid = np.linspace(-5, 5, 41)
    for x0 in grid:
        for p0 in grid:
            (image,) = bj_to_weyl_exp(ctx, [heisenberg_symbol(ctx, [x0, p0])]) or [None]
            killed = image is None or image.max_abs_coefficient() <= 1e-14
            assert killed == (abs(theta(ctx, [x0, p0])) <= 1e-14)


def _heisenberg_points(ctx, count, rng):
    on = []
    while len(on) < count // 2:
        k = int(rng.choice([-2, -1, 1, 2]))
        x = float(rng.uniform(0.3, 4.0)) * rng.choice([-1, 1])
        on.append([x, 2 * math.pi * k * ctx.hbar / x])
    off = rng.uniform(-4, 4, size=(count - len(on), 2)).tolist()
    return on + off


def test_heisenberg_round_trip():
    rng = np.random.default_rng(5)
    for hbar in (0.5, 1.0):
        ctx = ThetaContext(hbar=hbar)
        for z0 in _heisenberg_points(ctx, 50, rng):
            sol = solve_heisenberg_bj(ctx, z0)
            (image,) = bj_to_weyl_exp(ctx, [sol])
            assert _max_diff(image.poly, {(0, 0): 1.0}) <= 1e-9


def test_heisenberg_on_zero_set_has_degree_one():
    ctx = ThetaContext(hbar=1.0, n=2)
    sol = solve_heisenberg_bj(ctx, witness_point(ctx))
    assert sol.degree == 1
    (image,) = bj_to_weyl_exp(ctx, [sol])
    assert _max_diff(image.poly, {(0, 0, 0, 0): 1.0}) <= 1e-9


def test_heisenberg_solution_is_not_unique_on_zero_set():
    ctx = ThetaContext(hbar=1.0)
    z0 = witness_point(ctx).z
    sol = solve_heisenberg_bj(ctx, z0)
    shifted = ExpPolyTerm(z0, {**sol.poly, (0, 0): 3.0 - 1j})
    (image,) = bj_to_weyl_exp(ctx, [shifted])
    assert _max_diff(image.poly, {(0, 0): 1.0}) <= 1e-9


@pytest.mark.parametrize("n", [1, 2])
def test_division_round_trip(n):
    rng = np.random.default_rng(40 + n)
    ctx = ThetaContext(hbar=0.9, n=n)
    points = [rng.uniform(-2, 2, size=2 * n), witness_point(ctx).z]
    for z0 in points:
        b = ExpPolyTerm(z0, _random_poly(rng, 2 * n, 2))
        (a,) = weyl_to_bj_exp(ctx, [b])
        (back,) = bj_to_weyl_exp(ctx, [a])
        assert _max_diff(back.poly, b.poly) <= 1e-9


def test_division_at_zero_raises_degree():
    ctx = ThetaContext()
    jet = DeltaJet(witness_point(ctx).z, {(0, 0): 1.0})
    a = divide_theta_jet(ctx, jet)
    assert a.order == 1
    with pytest.raises(JetDivisionError):
        divide_theta_jet(ctx, jet, max_order=0)
