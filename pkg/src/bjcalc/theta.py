"""Numerics of the Cohen kernel ``Theta(z) = sinc(x.p / 2 hbar)``.

Points in phase space are arrays whose last axis holds ``(x_1..x_n, p_1..p_n)``;
``PhasePoint`` is accepted wherever such an array is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scalars import theta_series_coeff

SERIES_CUTOFF = 1e-4


class DomainError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThetaContext:
    hbar: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")

    @property
    def threshold(self) -> float:
        """``sqrt(4 pi hbar)``, the distance from the origin to the zero set."""
        return math.sqrt(4 * math.pi * self.hbar)


@dataclass(frozen=True)
class PhasePoint:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if x.shape != p.shape or x.ndim != 1:
            raise ValueError("x and p must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p))):
            raise ValueError("phase-space coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_array(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.size % 2:
            raise ValueError("z must have even length 2n")
        n = z.size // 2
        return cls(z[:n], z[n:])

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    def __array__(self, dtype=None, copy=None):
        return self.z if dtype is None else self.z.astype(dtype)


def _as_array(ctx: ThetaContext, z) -> np.ndarray:
    z = np.asarray(z.z if isinstance(z, PhasePoint) else z, dtype=float)
    if z.shape[-1] != 2 * ctx.n:
        raise ValueError(f"expected last axis of length {2 * ctx.n}, got {z.shape}")
    return z


def _split(ctx, z):
    return z[..., : ctx.n], z[..., ctx.n :]


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


# sinc and its derivatives -------------------------------------------------


def sinc(t):
    """``sin(t)/t`` with a 4-term Maclaurin branch for ``|t| < 1e-4``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SERIES_CUTOFF
    safe = np.where(small, 1.0, t)
    t2 = t * t
    series = 1 - t2 / 6 * (1 - t2 / 20 * (1 - t2 / 42))
    return _scalar(np.where(small, series, np.sin(safe) / safe))


# sinc'(t) = t * sum_k c_k t^(2k), c_k = (-1)^(k+1) (2k+2) / (2k+3)!
_PRIME_COEFFS = np.array([(-1) ** (k + 1) * (2 * k + 2) / math.factorial(2 * k + 3) for k in range(11)])


def sinc_prime(t):
    """Derivative of ``sinc``.

    The closed form ``(t cos t - sin t)/t^2`` cancels catastrophically for
    small ``t``, so ``|t| < 1`` uses the Maclaurin series (11 terms, error
    below ``1e-24``).
    """
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1.0
    safe = np.where(small, 1.0, t)
    series = t * np.polynomial.polynomial.polyval(t * t, _PRIME_COEFFS)
    return _scalar(np.where(small, series, (safe * np.cos(safe) - np.sin(safe)) / (safe * safe)))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)
_GL_S = 0.5 * (_GL_NODES + 1)
_GL_W = 0.5 * _GL_WEIGHTS


def sinc_derivatives(t: float, order: int) -> np.ndarray:
    """``[S(t), S'(t), ..., S^(order)(t)]`` for ``S = sinc``.

    Small ``|t|`` uses the exact Maclaurin coefficients, moderate ``|t|`` the
    representation ``S^(j)(t) = int_0^1 s^j cos(s t + j pi/2) ds`` and large
    ``|t|`` the recurrence ``t S^(j) + j S^(j-1) = sin(t + j pi/2)``, which is
    stable once ``|t|`` exceeds the order.
    """
    t = float(t)
    out = np.empty(order + 1)
    if abs(t) <= 1.0:
        for j in range(order + 1):
            total = 0.0
            k = (j + 1) // 2
            while True:
                c = float(theta_series_coeff(k)) * math.perm(2 * k, j)
                term = c * t ** (2 * k - j)
                total += term
                if 2 * k - j > 8 and abs(term) < 1e-18 * max(abs(total), 1e-300):
                    break
                k += 1
            out[j] = total
    elif abs(t) <= 40.0 or abs(t) <= 2 * order:
        for j in range(order + 1):
            out[j] = np.dot(_GL_W, _GL_S**j * np.cos(_GL_S * t + j * math.pi / 2))
    else:
        out[0] = math.sin(t) / t
        for j in range(1, order + 1):
            out[j] = (math.sin(t + j * math.pi / 2) - j * out[j - 1]) / t
    return out


# Theta ---------------------------------------------------------------------


def theta(ctx: ThetaContext, z):
    z = _as_array(ctx, z)
    x, p = _split(ctx, z)
    return sinc(np.sum(x * p, axis=-1) / (2 * ctx.hbar))


def theta_quadrature(ctx: ThetaContext, z, m: int = 64, nodes: int = 8):
    """Composite Gauss-Legendre value of ``int_0^1 cos((tau - 1/2) x.p / hbar) dtau``."""
    if m < 1:
        raise ValueError("panel count must be at least 1")
    z = _as_array(ctx, z)
    x, p = _split(ctx, z)
    omega = np.sum(x * p, axis=-1) / ctx.hbar
    g, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.arange(m) / m
    tau = (edges[:, None] + (g[None, :] + 1) / (2 * m)).ravel()
    weights = np.tile(w / (2 * m), m)
    phase = np.multiply.outer(omega, tau - 0.5)
    return _scalar(np.cos(phase) @ weights)


def theta_gradient(ctx: ThetaContext, z) -> np.ndarray:
    """``(dTheta/dx, dTheta/dp) = sinc'(t) (p, x) / 2 hbar``."""
    z = _as_array(ctx, z)
    x, p = _split(ctx, z)
    t = np.sum(x * p, axis=-1) / (2 * ctx.hbar)
    scale = np.asarray(sinc_prime(t))[..., None] / (2 * ctx.hbar)
    return np.concatenate([p, x], axis=-1) * scale


def witness_point(ctx: ThetaContext) -> PhasePoint:
    """``x0 = p0 = (2 pi hbar / n)^(1/2) (1,...,1)``: a zero of Theta at distance ``sqrt(4 pi hbar)``."""
    v = math.sqrt(2 * math.pi * ctx.hbar / ctx.n) * np.ones(ctx.n)
    return PhasePoint(v, v.copy())


# distance to the zero set ------------------------------------------------


def _project_branch(x, p, c, max_iter=200):
    """Nearest point on ``{a.b = c}`` for each row of ``x``, ``p`` (``c != 0``).

    In the rotated coordinates ``w+- = (x +- p)/sqrt 2`` the surface is
    ``|a+|^2 - |a-|^2 = 2c``.  The Lagrange condition gives
    ``a+ = w+/mu, a- = w-/(2 - mu)`` with ``mu = 1 - lambda in (0, 2)`` the unique
    root of a strictly monotone secular equation; boundary roots are the
    degenerate cases where ``w+`` or ``w-`` vanishes.
    """
    x = np.array(x, dtype=float)
    p = np.array(p, dtype=float)
    c = np.asarray(c, dtype=float)
    flip = c < 0
    p[flip] = -p[flip]
    c = np.abs(c)
    s2 = math.sqrt(2.0)
    wp = (x + p) / s2
    wm = (x - p) / s2
    A = np.sum(wp * wp, axis=-1)
    B = np.sum(wm * wm, axis=-1)
    n = x.shape[-1]
    unit = np.ones(n) / math.sqrt(n)

    hard_plus = A == 0
    hard_minus = (B == 0) & (A >= 8 * c) & ~hard_plus
    regular = ~hard_plus & ~hard_minus

    mu = np.ones_like(A)
    Ar, Br, cr = A[regular], B[regular], c[regular]
    if Ar.size:
        hi = np.minimum(np.sqrt(Ar / (2 * cr)), 2.0)
        lo = np.zeros_like(hi)
        # start strictly inside (0, 2) so the secular function stays finite
        m = np.where(hi < 2.0, hi, 1.0)
        active = Br > 0  # with B == 0 the bound hi is already the root
        for _ in range(max_iter):
            if not active.any():
                break
            ma = m[active]
            Aa, Ba, ca = Ar[active], Br[active], cr[active]
            q = 2 - ma
            f = Aa / ma**2 - Ba / q**2 - 2 * ca
            df = -2 * Aa / ma**3 - 2 * Ba / q**3
            lo_a, hi_a = lo[active], hi[active]
            # f is decreasing: f > 0 means the root lies to the right
            lo_a = np.where(f > 0, ma, lo_a)
            hi_a = np.where(f <= 0, ma, hi_a)
            step = ma - f / df
            bad = ~((step >= lo_a) & (step <= hi_a))
            new = np.where(bad, 0.5 * (lo_a + hi_a), step)
            done = (np.abs(new - ma) <= 4e-16 * ma) | (f == 0) | (hi_a - lo_a <= 4e-16 * hi_a)
            idx = np.flatnonzero(active)
            m[idx] = new
            lo[idx], hi[idx] = lo_a, hi_a
            active[idx[done]] = False
        else:
            if active.any():
                k = np.flatnonzero(active)[0]
                raise ConvergenceError(
                    f"projection did not converge after {max_iter} iterations "
                    f"(A={Ar[k]!r}, B={Br[k]!r}, c={cr[k]!r}, mu={m[k]!r})"
                )
        mu[regular] = m

    a_plus = np.empty_like(wp)
    a_minus = np.empty_like(wm)
    a_plus[regular] = wp[regular] / mu[regular, None]
    a_minus[regular] = wm[regular] / (2 - mu[regular, None])
    if hard_plus.any():
        a_minus[hard_plus] = wm[hard_plus] / 2
        radius = np.sqrt(2 * c[hard_plus] + B[hard_plus] / 4)
        a_plus[hard_plus] = radius[:, None] * unit
    if hard_minus.any():
        a_plus[hard_minus] = wp[hard_minus] / 2
        radius = np.sqrt(A[hard_minus] / 4 - 2 * c[hard_minus])
        a_minus[hard_minus] = radius[:, None] * unit
    ax = (a_plus + a_minus) / s2
    ap = (a_plus - a_minus) / s2
    ap[flip] = -ap[flip]
    p[flip] = -p[flip]
    dist = np.sqrt(np.sum((ax - x) ** 2 + (ap - p) ** 2, axis=-1))
    return dist, ax, ap


@dataclass(frozen=True)
class ZeroSetDistance:
    distance: float
    nearest: PhasePoint
    k: int


def nearest_zeros(ctx: ThetaContext, z, k=None):
    """Batched distance from rows of ``z`` to ``Z = {x.p = 2 pi k hbar, k != 0}``.

    Returns ``(distance, nearest, branch)`` arrays.  A branch ``k`` can only
    beat the current best ``d`` if ``|x.p - 2 pi k hbar| <= d (|z| + d)``,
    since ``|grad(x.p)| = |z|``; only those branches are projected onto.
    """
    z = np.atleast_2d(_as_array(ctx, z))
    x, p = _split(ctx, z)
    period = 2 * math.pi * ctx.hbar
    if k is not None:
        k = int(k)
        if k == 0:
            raise ValueError("branch k must be non-zero")
        kk = np.full(len(z), k)
        d, ax, ap = _project_branch(x, p, kk * period)
        return d, np.concatenate([ax, ap], axis=-1), kk

    u = np.sum(x * p, axis=-1)
    norm = np.linalg.norm(z, axis=-1)
    k_lo = np.floor(u / period).astype(np.int64)
    best_d = np.full(len(z), np.inf)
    best_pt = np.zeros_like(z)
    best_k = np.zeros(len(z), dtype=np.int64)

    def consider(kk, mask):
        if not mask.any():
            return
        d, ax, ap = _project_branch(x[mask], p[mask], kk[mask] * period)
        idx = np.flatnonzero(mask)
        cur_d, cur_k = best_d[idx], best_k[idx]
        # ties go to the smaller |k|, then to positive k
        better = (d < cur_d) | (
            (d == cur_d) & ((np.abs(kk[idx]) < np.abs(cur_k)) | ((np.abs(kk[idx]) == np.abs(cur_k)) & (kk[idx] > cur_k)))
        )
        sel = idx[better]
        best_d[sel] = d[better]
        best_pt[sel] = np.concatenate([ax, ap], axis=-1)[better]
        best_k[sel] = kk[idx][better]

    for cand in (k_lo, k_lo + 1):
        cand = np.where(cand == 0, np.where(u >= 0, 1, -1), cand)
        consider(cand, np.ones(len(z), dtype=bool))
    reach = best_d * (norm + best_d)
    k_min = np.ceil((u - reach) / period).astype(np.int64)
    k_max = np.floor((u + reach) / period).astype(np.int64)
    span = int(np.max(k_max - k_min)) if len(z) else -1
    for j in range(span + 1):
        kk = k_min + j
        mask = (kk <= k_max) & (kk != 0) & (kk != k_lo) & (kk != k_lo + 1)
        consider(kk, mask)
    return best_d, best_pt, best_k


def zero_set_distance(ctx: ThetaContext, z, k: int | None = None) -> ZeroSetDistance:
    """Distance from one point to the zero set of Theta, with the nearest zero.

    ``k`` forces a branch ``x.p = 2 pi k hbar``.
    """
    z = _as_array(ctx, z)
    if z.ndim != 1:
        raise ValueError("zero_set_distance takes a single point; use nearest_zeros for batches")
    d, pts, ks = nearest_zeros(ctx, z[None, :], k)
    return ZeroSetDistance(float(d[0]), PhasePoint.from_array(pts[0]), int(ks[0]))


# quantitative lower bounds ------------------------------------------------


HO1_FLOOR = 1e-3
GRADIENT_FLOOR = 2 - 1e-9


@dataclass
class BoundsReport:
    samples: int
    box: float
    ho1_min_ratio: float
    ho1_witness: np.ndarray
    gradient_min: float
    gradient_witness: np.ndarray
    sinc_min_ratio: float
    sinc_witness: float
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def check_hormander_bounds(ctx: ThetaContext, sample_box: float = 10.0, samples: int = 10_000, seed: int = 0) -> BoundsReport:
    """Sample the lower bounds on ``|Theta|`` and ``|grad Theta|`` near the zero set.

    * ``|Theta(z)| (1+|z|)^2 / dist(z, Z)`` has a positive infimum (floor ``1e-3``);
    * ``|grad Theta(z)| |z| >= 2`` at zeros (the sampled points' nearest zeros);
    * ``|sinc(t/2hbar)| (1+|t|) / dist(t, Z0)`` is positive, and its two
      pieces hold: ``>= 2/pi`` for ``|t| <= pi hbar`` and
      ``>= 2 dist(t, Z0) / (pi |t|)`` beyond.

    ``sample_box`` is the half-width of the box in units of ``sqrt(hbar)``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    half = sample_box * math.sqrt(ctx.hbar)
    z = rng.uniform(-half, half, size=(samples, 2 * ctx.n))
    failures = []

    d, nearest, _ = nearest_zeros(ctx, z)
    th = np.abs(np.asarray(theta(ctx, z)))
    norm = np.linalg.norm(z, axis=-1)
    off = d > 1e-12
    ratio = np.full(samples, np.inf)
    ratio[off] = th[off] * (1 + norm[off]) ** 2 / d[off]
    i = int(np.argmin(ratio))
    ho1_min = float(ratio[i])
    if not ho1_min >= HO1_FLOOR:
        failures.append(f"ho1 ratio {ho1_min!r} below floor {HO1_FLOOR} at z={z[i].tolist()}")

    grad = np.linalg.norm(theta_gradient(ctx, nearest), axis=-1) * np.linalg.norm(nearest, axis=-1)
    j = int(np.argmin(grad))
    grad_min = float(grad[j])
    if not grad_min >= GRADIENT_FLOOR:
        failures.append(f"|grad Theta| |z| = {grad_min!r} < 2 at z={nearest[j].tolist()}")

    t_max = ctx.n * half * half
    t = rng.uniform(-t_max, t_max, size=samples)
    period = 2 * math.pi * ctx.hbar
    kk = np.round(t / period)
    kk = np.where(kk == 0, np.where(t >= 0, 1.0, -1.0), kk)
    dist_t = np.abs(t - kk * period)
    s = np.abs(np.asarray(sinc(t / (2 * ctx.hbar))))
    with np.errstate(divide="ignore"):
        sratio = np.where(dist_t > 0, s * (1 + np.abs(t)) / dist_t, np.inf)
    m = int(np.argmin(sratio))
    sinc_min = float(sratio[m])
    if not sinc_min > 0:
        failures.append(f"sinc bound infimum not positive at t={t[m]!r}")
    inner = np.abs(t) <= math.pi * ctx.hbar
    if np.any(s[inner] < 2 / math.pi - 1e-15):
        w = t[inner][np.argmin(s[inner])]
        failures.append(f"|sinc(t/2hbar)| < 2/pi at t={w!r}")
    outer = ~inner
    slack = s[outer] - 2 * dist_t[outer] / (math.pi * np.abs(t[outer]))
    if np.any(slack < -1e-15):
        w = t[outer][np.argmin(slack)]
        failures.append(f"|sinc(t/2hbar)| < 2 dist(t,Z0)/(pi|t|) at t={w!r}")

    return BoundsReport(
        samples=samples,
        box=sample_box,
        ho1_min_ratio=ho1_min,
        ho1_witness=z[i],
        gradient_min=grad_min,
        gradient_witness=nearest[j],
        sinc_min_ratio=sinc_min,
        sinc_witness=float(t[m]),
        failures=failures,
    )


# homogeneous change of coordinates -----------------------------------------


def cone_forward(z) -> np.ndarray:
    """``y1 = z1^2, y_j = z1 z_j (2<=j<=n), y_(n+j-1) = z1 z_(n+j) (2<=j<=n), y_2n = x.p``."""
    z = np.asarray(z.z if isinstance(z, PhasePoint) else z, dtype=float)
    if z.shape[-1] % 2:
        raise ValueError("z must have even length 2n")
    if np.any(z[..., 0] <= 0):
        raise DomainError("forward cone coordinates need z1 > 0")
    n = z.shape[-1] // 2
    z1 = z[..., :1]
    x, p = z[..., :n], z[..., n:]
    return np.concatenate([z1 * z1, z1 * x[..., 1:], z1 * p[..., 1:], np.sum(x * p, axis=-1, keepdims=True)], axis=-1)


def cone_inverse(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape[-1] % 2:
        raise ValueError("y must have even length 2n")
    if np.any(y[..., 0] <= 0):
        raise DomainError("inverse cone coordinates need y1 > 0")
    n = y.shape[-1] // 2
    r = np.sqrt(y[..., :1])
    x_rest = y[..., 1:n] / r
    p_rest = y[..., n : 2 * n - 1] / r
    # y_2n = z1 p1 + sum_(j>=2) x_j p_j
    p1 = (y[..., -1:] - np.sum(x_rest * p_rest, axis=-1, keepdims=True)) / r
    return np.concatenate([r, x_rest, p1, p_rest], axis=-1)
