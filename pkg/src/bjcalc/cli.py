"""``bjcalc`` command line.

Exit codes: 0 success, 1 internal error, 2 parse or usage error,
3 verification failure, 4 threshold violation.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import grid as gridmod
from .expsym import JetDivisionError, format_exp_term, format_number, kernel_witness, solve_heisenberg_bj
from .quantize import ConsistencyError, Scheme, convert, dequantize, quantize
from .text import ParseError, parse_operator, parse_symbol, print_operator, print_symbol
from .theta import (
    ConvergenceError,
    DomainError,
    ThetaContext,
    check_hormander_bounds,
    cone_forward,
    cone_inverse,
    theta,
    theta_gradient,
    zero_set_distance,
)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_VERIFY, EXIT_THRESHOLD = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


class VerificationFailure(RuntimeError):
    pass


def _positive_real(text: str) -> float:
    try:
        value = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or rational number: {text!r}")
    if not (value > 0 and np.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(Fraction(t.strip())) for t in text.split(",")])
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _default_hbar() -> float:
    env = os.environ.get("BJCALC_HBAR")
    if env is None:
        return 1.0
    try:
        return _positive_real(env)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"BJCALC_HBAR: {exc}")


# output ----------------------------------------------------------------------


class Out:
    def __init__(self, args):
        self.records = args.output == "records"
        self.precision = args.precision
        self.lines: list[str] = []

    def num(self, v: float) -> str:
        return format_number(float(v), self.precision)

    def vec(self, v) -> str:
        return ",".join(self.num(t) for t in np.ravel(v))

    def emit(self, text: str, **records):
        """Print ``text`` in text mode or ``key=value`` lines in records mode."""
        if self.records:
            self.lines.extend(f"{k}={v}" for k, v in records.items())
        else:
            self.lines.append(text)


def _ctx(args) -> ThetaContext:
    return ThetaContext(hbar=args.hbar, n=args.dim)


def _point(args, z, name="--z") -> np.ndarray:
    if z is None:
        raise UsageError(f"{name} is required")
    if z.size != 2 * args.dim:
        raise UsageError(f"{name} needs {2 * args.dim} components for --dim {args.dim}, got {z.size}")
    return z


# commands ----------------------------------------------------------------------


def cmd_quantize(args, out: Out):
    op = quantize(parse_symbol(args.symbol), Scheme(args.scheme))
    text = print_operator(op)
    out.emit(text, operator=text)


def cmd_dequantize(args, out: Out):
    a = dequantize(parse_operator(args.operator), Scheme(args.scheme))
    text = print_symbol(a)
    out.emit(text, symbol=text)


def cmd_convert(args, out: Out):
    a = convert(parse_symbol(args.symbol), Scheme(args.source), Scheme(args.target))
    text = print_symbol(a)
    out.emit(text, symbol=text)


def cmd_theta(args, out: Out):
    ctx = _ctx(args)
    action = args.action
    if action == "bounds":
        rep = check_hormander_bounds(ctx, sample_box=args.box, samples=args.samples, seed=args.seed)
        status = "PASS" if rep.passed else "FAIL"
        fields = {
            "status": status,
            "samples": str(rep.samples),
            "box": out.num(rep.box),
            "ho1_min_ratio": out.num(rep.ho1_min_ratio),
            "ho1_witness": out.vec(rep.ho1_witness),
            "gradient_min": out.num(rep.gradient_min),
            "gradient_witness": out.vec(rep.gradient_witness),
            "sinc_min_ratio": out.num(rep.sinc_min_ratio),
            "sinc_witness": out.num(rep.sinc_witness),
        }
        for j, msg in enumerate(rep.failures):
            fields[f"failure{j + 1}"] = msg
        if out.records:
            out.emit("", **fields)
        else:
            out.lines.append(status)
            out.lines.extend(f"{k} {v}" for k, v in fields.items() if k != "status")
        if not rep.passed:
            raise VerificationFailure("bound check failed: " + "; ".join(rep.failures))
        return
    z = _point(args, args.z)
    if action == "eval":
        v = out.num(theta(ctx, z))
        out.emit(v, theta=v)
    elif action == "grad":
        v = out.vec(theta_gradient(ctx, z))
        out.emit(v, gradient=v)
    elif action == "dist":
        res = zero_set_distance(ctx, z, k=args.k)
        d = out.num(res.distance)
        out.emit(d, distance=d, k=str(res.k), nearest=out.vec(res.nearest.z))
    elif action == "coords":
        y = cone_inverse(z) if args.inverse else cone_forward(z)
        v = out.vec(y)
        out.emit(v, **{("z" if args.inverse else "y"): v})


def cmd_heisenberg(args, out: Out):
    ctx = _ctx(args)
    text = format_exp_term(solve_heisenberg_bj(ctx, _point(args, args.z0, "--z0")), out.precision)
    out.emit(text, symbol=text)


def _radius(args, ctx: ThetaContext) -> float:
    if args.r is not None:
        return args.r
    if args.r_ratio is not None:
        return args.r_ratio * ctx.threshold
    raise UsageError("one of --r or --r-ratio is required")


def cmd_kernel_witness(args, out: Out):
    ctx = _ctx(args)
    w = kernel_witness(ctx, _radius(args, ctx))
    text = "none" if w is None else format_exp_term(w, out.precision)
    out.emit(text, witness=text)


def _read_grid(path: str) -> gridmod.GridSymbol:
    if path is None:
        raise UsageError("--in is required")
    try:
        return gridmod.load(path)
    except OSError as exc:
        raise UsageError(str(exc))


def _write_grid(a: gridmod.GridSymbol, path: str, out: Out):
    if path is None:
        raise UsageError("--out is required")
    if path.endswith(".csv"):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(gridmod.to_csv(a))
    else:
        gridmod.save(a, path)
    out.emit(f"wrote {path}", path=path)


def cmd_grid(args, out: Out):
    if args.dim != 1:
        raise UsageError("grid commands support --dim 1 only")
    ctx = _ctx(args)
    action = args.action
    if action in ("forward", "inverse"):
        # the file carries its own hbar
        a = _read_grid(args.input)
        b = gridmod.grid_forward(a) if action == "forward" else gridmod.grid_inverse(a)
        _write_grid(b, args.out, out)
        return
    r = _radius(args, ctx)
    L = args.L if args.L is not None else r
    if L < r:
        raise UsageError("--L must be at least the support radius")
    a = gridmod.gaussian_bump(ctx, r, args.N, L=L, width=args.width)
    if action == "fixture":
        _write_grid(a, args.out, out)
        return
    cond = gridmod.condition_number(a)
    if action == "cond":
        c = out.num(cond)
        out.emit(c, condition_number=c)
        return
    back = gridmod.grid_inverse(gridmod.grid_forward(a))
    err = float(np.abs(back.samples - a.samples).max() / np.abs(a.samples).max())
    ok = err <= 1e-12
    if out.records:
        out.emit("", max_rel_err=f"{err:.3e}", passed=str(ok).lower(), condition_number=out.num(cond))
    else:
        out.lines.append("max_rel_err < 1e-12" if ok else f"max_rel_err = {err:.3e}")
        out.lines.append(f"condition_number {out.num(cond)}")
    if not ok:
        raise VerificationFailure(f"round trip error {err:.3e} exceeds 1e-12")


# parser --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--hbar", type=_positive_real, default=None, help="numeric hbar (decimal or p/q); env BJCALC_HBAR")
    common.add_argument("--dim", type=int, default=1, help="phase-space half dimension n")
    common.add_argument("--output", choices=("text", "records"), default="text")
    common.add_argument("--precision", type=int, default=12, help="decimal digits in numeric output")

    parser = _Parser(prog="bjcalc", description="Born-Jordan and Weyl quantization calculus")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("quantize", parents=[common], help="symbol -> normal-ordered operator")
    p.add_argument("--scheme", choices=("weyl", "bj"), required=True)
    p.add_argument("symbol")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("dequantize", parents=[common], help="operator -> symbol")
    p.add_argument("--scheme", choices=("weyl", "bj"), required=True)
    p.add_argument("operator")
    p.set_defaults(func=cmd_dequantize)

    p = sub.add_parser("convert", parents=[common], help="change symbol between schemes")
    p.add_argument("--from", dest="source", choices=("weyl", "bj"), required=True)
    p.add_argument("--to", dest="target", choices=("weyl", "bj"), required=True)
    p.add_argument("symbol")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("theta", parents=[common], help="the kernel sinc(x.p/2hbar)")
    p.add_argument("action", choices=("eval", "grad", "dist", "bounds", "coords"))
    p.add_argument("--z", type=_vector)
    p.add_argument("--k", type=int, default=None, help="restrict dist to one branch x.p = 2 pi k hbar")
    p.add_argument("--inverse", action="store_true", help="coords: map cone coordinates back")
    p.add_argument("--box", type=_positive_real, default=10.0, help="bounds: half width in units of sqrt(hbar)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("heisenberg", parents=[common], help="BJ symbol of a Heisenberg operator")
    p.add_argument("--z0", type=_vector, required=True)
    p.set_defaults(func=cmd_heisenberg)

    p = sub.add_parser("kernel-witness", parents=[common], help="element of the BJ kernel within radius r")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", type=_positive_real)
    g.add_argument("--r-ratio", type=_positive_real, help="r in units of sqrt(4 pi hbar)")
    p.set_defaults(func=cmd_kernel_witness)

    p = sub.add_parser("grid", parents=[common], help="grid symbols in dimension 1")
    p.add_argument("action", choices=("roundtrip", "cond", "forward", "inverse", "fixture"))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--r", type=_positive_real)
    g.add_argument("--r-ratio", type=_positive_real, help="r in units of sqrt(4 pi hbar)")
    p.add_argument("--N", type=int, default=128)
    p.add_argument("--L", type=_positive_real, default=None, help="half width (default r)")
    p.add_argument("--width", type=_positive_real, default=None, help="Gaussian width (default r/8)")
    p.add_argument("--in", dest="input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    out_stream, err = sys.stdout, sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.hbar is None:
            args.hbar = _default_hbar()
        if args.dim < 1:
            raise UsageError("--dim must be at least 1")
        if args.precision < 0:
            raise UsageError("--precision must be non-negative")
        out = Out(args)
        code = EXIT_OK
        try:
            args.func(args, out)
        except VerificationFailure as exc:
            code = EXIT_VERIFY
            print(f"error: {exc}", file=err)
        for line in out.lines:
            out_stream.write(line + "\n")
        return code
    except (UsageError, ParseError, DomainError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (ConsistencyError, JetDivisionError, ConvergenceError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_VERIFY
    except gridmod.ThresholdViolation as exc:
        print(f"error: threshold violation: {exc}", file=err)
        return EXIT_THRESHOLD
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
