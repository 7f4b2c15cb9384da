"""Band-limited symbols sampled through their covariant symbols on a square grid.

The Born-Jordan to Weyl map acts on covariant symbols as multiplication by
Theta, so on a grid it is pointwise.  Inversion is only possible while the
support stays inside the open ball of radius sqrt(4 pi hbar).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .theta import PhasePoint, ThetaContext, theta

SUPPORT_TOL = 1e-14
MIN_THETA = 1e-9
MAGIC = b"BJGR"
VERSION = 1
_HEADER = struct.Struct("<4sIIddd")


class ThresholdViolation(ValueError):
    """Division by Theta would meet (or come too close to) its zero set."""


def _nodes(L: float, N: int) -> np.ndarray:
    return -L + (2.0 * L / N) * np.arange(N)


def _mesh(L: float, N: int):
    t = _nodes(L, N)
    return np.meshgrid(t, t, indexing="ij")


@dataclass(frozen=True)
class GridSymbol:
    """Samples of a covariant symbol on the nodes ``-L + i h``, ``h = 2L/N``.

    ``samples[i, j]`` sits at ``(x, p) = (nodes[i], nodes[j])``.
    """

    ctx: ThetaContext
    half_width: float
    resolution: int
    samples: np.ndarray
    support_radius: float

    def __post_init__(self):
        if self.ctx.n != 1:
            raise ValueError("grid symbols live in dimension n = 1")
        L, N, r = self.half_width, self.resolution, self.support_radius
        if not (np.isfinite(L) and L > 0):
            raise ValueError("half_width must be positive and finite")
        if N <= 0 or N % 2:
            raise ValueError("resolution must be a positive even integer")
        if not (np.isfinite(r) and 0 < r <= L):
            raise ValueError("support_radius must satisfy 0 < r <= L")
        s = np.asarray(self.samples, dtype=np.complex128)
        if s.shape != (N, N):
            raise ValueError(f"samples must have shape ({N}, {N}), got {s.shape}")
        outside = ~self.support_mask()
        if outside.any() and np.abs(s[outside]).max() >= SUPPORT_TOL:
            raise ValueError("samples do not vanish outside the support radius")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.resolution

    @property
    def nodes(self) -> np.ndarray:
        return _nodes(self.half_width, self.resolution)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return _mesh(self.half_width, self.resolution)

    def support_mask(self) -> np.ndarray:
        x, p = self.mesh()
        return np.hypot(x, p) <= self.support_radius

    def with_samples(self, samples) -> "GridSymbol":
        return replace(self, samples=samples)


def _theta_grid(a: GridSymbol) -> np.ndarray:
    x, p = a.mesh()
    return theta(a.ctx, np.stack([x, p], axis=-1))


def grid_forward(a: GridSymbol) -> GridSymbol:
    """Covariant Weyl symbol of ``Op_BJ(a)``: multiply by Theta."""
    return a.with_samples(a.samples * _theta_grid(a))


def _support_theta(b: GridSymbol) -> tuple[np.ndarray, np.ndarray]:
    if b.support_radius >= b.ctx.threshold:
        raise ThresholdViolation(
            f"support radius {b.support_radius!r} reaches the zero set of Theta at {b.ctx.threshold!r}"
        )
    mask = b.support_mask()
    th = _theta_grid(b)
    if mask.any() and np.abs(th[mask]).min() < MIN_THETA:
        raise ThresholdViolation("|Theta| drops below 1e-9 on the support")
    return mask, th


def grid_inverse(b: GridSymbol) -> GridSymbol:
    mask, th = _support_theta(b)
    out = np.zeros_like(b.samples)
    out[mask] = b.samples[mask] / th[mask]
    return b.with_samples(out)


def condition_number(b: GridSymbol) -> float:
    """Largest amplification ``1/|Theta|`` over support grid points."""
    mask, th = _support_theta(b)
    if not mask.any():
        return 1.0
    return float(1.0 / np.abs(th[mask]).min())


def synthesize(a: GridSymbol, points) -> np.ndarray:
    """Recover the symbol from its covariant samples by direct quadrature.

    ``a(z) = (2 pi hbar)^-1 sum exp(-(i/hbar) sigma(z, z')) a_sigma(z') h^2``
    """
    hbar = a.ctx.hbar
    pts = np.array([q.z if isinstance(q, PhasePoint) else np.asarray(q, dtype=float) for q in points]).reshape(-1, 2)
    x, p = a.mesh()
    mask = a.samples != 0
    xs, ps, vals = x[mask], p[mask], a.samples[mask]
    # sigma(z, z') = p x' - x p'
    phase = np.outer(pts[:, 1], xs) - np.outer(pts[:, 0], ps)
    w = a.spacing**2 / (2.0 * np.pi * hbar)
    return np.exp(-1j / hbar * phase) @ vals * w


def gaussian_bump(ctx: ThetaContext, r: float, N: int, L: float | None = None, width: float | None = None) -> GridSymbol:
    """``exp(-|z|^2 / 2 s^2)`` truncated at ``|z| <= r``; ``s = r/8`` unless given."""
    s = r / 8.0 if width is None else width
    L = r if L is None else L
    x, p = _mesh(L, N)
    rho2 = x**2 + p**2
    samples = np.where(rho2 <= r * r, np.exp(-rho2 / (2.0 * s * s)), 0.0).astype(np.complex128)
    return GridSymbol(ctx, float(L), int(N), samples, float(r))


# exchange formats ------------------------------------------------------------


def to_bytes(a: GridSymbol) -> bytes:
    head = _HEADER.pack(MAGIC, VERSION, a.resolution, a.half_width, a.ctx.hbar, a.support_radius)
    return head + np.ascontiguousarray(a.samples, dtype="<c16").tobytes()


def from_bytes(data: bytes) -> GridSymbol:
    if len(data) < _HEADER.size:
        raise ValueError("truncated grid header")
    magic, version, N, L, hbar, r = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported grid format version {version}")
    body = data[_HEADER.size :]
    if len(body) != 16 * N * N:
        raise ValueError(f"expected {N * N} samples, found {len(body) // 16}")
    samples = np.frombuffer(body, dtype="<c16").reshape(N, N).astype(np.complex128)
    return GridSymbol(ThetaContext(hbar=hbar, n=1), L, N, samples, r)


def save(a: GridSymbol, path) -> None:
    Path(path).write_bytes(to_bytes(a))


def load(path) -> GridSymbol:
    return from_bytes(Path(path).read_bytes())


def to_csv(a: GridSymbol) -> str:
    x, p = a.mesh()
    lines = ["z1,z2,re,im"]
    for xi, pi, v in zip(x.ravel().tolist(), p.ravel().tolist(), a.samples.ravel().tolist()):
        lines.append(f"{xi!r},{pi!r},{v.real!r},{v.imag!r}")
    return "\n".join(lines) + "\n"
