"""Command-line front end.

Exit codes: 0 success, 2 usage/validation error, 1 runtime failure
(including unparseable input files).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .convolution import convolve_coeff
from .core import as_multi_index
from .extension import extend_nd, extension_quality, seeley_weights
from .kernel import kernel_apply
from .operators import apply_E_coeff, apply_E_pointwise
from .selftest import format_table, run_selftest
from .transform import (
    FunctionHandle,
    analyze,
    analyze_samples,
    basis_function,
    decay_report,
    expdecay,
    gauss_laguerre_rule,
    gaussian,
    synthesize,
    tensor_nodes,
)

logger = logging.getLogger("lagorth")


class UsageError(ValueError):
    pass


@dataclass
class JobConfig:
    subcommand: str
    bounds: tuple[int, ...] | None = None
    rule_size: int | None = None
    order: int | None = None
    k_max: int = 4

    def __post_init__(self):
        if self.bounds is not None and self.rule_size is not None:
            if self.rule_size < max(self.bounds):
                raise UsageError(
                    f"--rule {self.rule_size} is smaller than the largest degree bound {max(self.bounds)}"
                )


def parse_index(text: str) -> tuple[int, ...]:
    try:
        return as_multi_index([int(t) for t in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad multi-index {text!r}: {exc}") from exc


def parse_function(spec: str, dims: int | None) -> FunctionHandle:
    """``laguerre:n[,n2..]``, ``expdecay:alpha`` or ``gaussian``."""
    name, _, arg = spec.partition(":")
    if name == "laguerre":
        n = parse_index(arg)
        if dims is not None and dims != len(n):
            raise UsageError(f"--dims {dims} does not match laguerre index {arg}")
        return basis_function(n)
    d = dims or 1
    if name == "expdecay":
        try:
            alpha = float(arg)
        except ValueError as exc:
            raise UsageError(f"expdecay needs a rate, got {arg!r}") from exc
        if alpha <= 0:
            raise UsageError("expdecay rate must be positive")
        return expdecay(alpha, d)
    if name == "gaussian":
        return gaussian(d)
    raise UsageError(f"unknown function {spec!r} (laguerre:n, expdecay:a, gaussian)")


def parse_grid(spec: str, dims: int) -> np.ndarray:
    """``start:stop:num`` per axis, comma separated; one spec is reused on every axis."""
    axes = []
    for part in spec.split(","):
        try:
            a, b, n = part.split(":")
            axes.append(np.linspace(float(a), float(b), int(n)))
        except ValueError as exc:
            raise UsageError(f"bad grid axis {part!r}, expected start:stop:num") from exc
    if len(axes) == 1:
        axes = axes * dims
    if len(axes) != dims:
        raise UsageError(f"grid has {len(axes)} axes, function has {dims}")
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _points(args, dims: int) -> np.ndarray:
    if args.points:
        pts, _ = io.read_samples_csv(args.points, require_values=False)
        if pts.shape[1] != dims:
            raise io.InputFormatError(f"{args.points}: {pts.shape[1]} coordinates, expected {dims}")
        return pts
    if args.grid:
        return parse_grid(args.grid, dims)
    raise UsageError("give --points or --grid")


def _write_values(path, pts, vals) -> None:
    if path:
        io.write_samples_csv(path, pts, vals)
    else:
        for p, v in zip(pts, vals):
            print(",".join(repr(float(t)) for t in p) + "," + repr(float(v)))


def _emit_json(obj: dict, path) -> None:
    text = json.dumps(obj, indent=2, allow_nan=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


# -- subcommands -------------------------------------------------------------


def cmd_nodes(args) -> int:
    rule = gauss_laguerre_rule(args.rule)
    pts, _ = tensor_nodes(rule, args.dims)
    if args.out:
        io.write_samples_csv(args.out, pts)
    else:
        for p in pts:
            print(",".join(repr(float(t)) for t in p))
    return 0


def cmd_analyze(args) -> int:
    if bool(args.input) == bool(args.fn):
        raise UsageError("analyze needs exactly one of --input or --fn")
    bounds = parse_index(args.bounds)
    JobConfig("analyze", bounds=bounds, rule_size=args.rule)
    rule = gauss_laguerre_rule(args.rule)
    if args.input:
        pts, vals = io.read_samples_csv(args.input)
        if len(bounds) == 1 and pts.shape[1] > 1:
            bounds = bounds * pts.shape[1]
        if pts.shape[1] != len(bounds):
            raise UsageError(f"--bounds has {len(bounds)} entries, samples are {pts.shape[1]}-d")
        coeffs = analyze_samples(io.samples_on_nodes(pts, vals, rule), bounds, rule)
    else:
        f = parse_function(args.fn, args.dims)
        if len(bounds) == 1 and f.dims > 1:
            bounds = bounds * f.dims
        coeffs = analyze(f, bounds, rule, threads=args.threads)
    io.dump_tensor(coeffs, args.out)
    return 0


def cmd_synth(args) -> int:
    c = io.load_tensor(args.coeffs)
    pts = _points(args, c.dims)
    _write_values(args.out, pts, synthesize(c, pts))
    return 0


def cmd_eval_basis(args) -> int:
    f = basis_function(parse_index(args.n))
    pts = _points(args, f.dims)
    _write_values(args.out, pts, f(pts))
    return 0


def cmd_convolve(args) -> int:
    io.dump_tensor(convolve_coeff(io.load_tensor(args.a), io.load_tensor(args.b)), args.out)
    return 0


def cmd_extend(args) -> int:
    JobConfig("extend", order=args.order)
    f = parse_function(args.fn, args.dims)
    w = seeley_weights(args.order, args.cutoff_width)
    g = extend_nd(f, w)
    pts = _points(args, f.dims)
    _write_values(args.out, pts, g(pts))
    if args.quality:
        q = extension_quality(f, g, args.order - 1, pts)
        _emit_json(
            {
                "order": args.order,
                "coefficients": list(w.coefficients),
                "derivative_mismatch": q.mismatches.tolist(),
                "seminorm_2_2": q.seminorms[(2, 2)],
                "growth_factor": q.growth_factor,
                "high_precision": q.high_precision,
            },
            args.quality,
        )
    return 0


def cmd_apply_e(args) -> int:
    if bool(args.coeffs) == bool(args.fn):
        raise UsageError("apply-e needs exactly one of --coeffs or --fn")
    if args.coeffs:
        out = apply_E_coeff(io.load_tensor(args.coeffs), args.power)
        if not args.out:
            raise UsageError("coefficient mode needs --out")
        io.dump_tensor(out, args.out)
        return 0
    if args.power != 1:
        raise UsageError("pointwise mode supports --power 1 only")
    f = parse_function(args.fn, args.dims)
    pts = _points(args, f.dims)
    _write_values(args.out, pts, apply_E_pointwise(f, pts))
    return 0


def cmd_classify(args) -> int:
    JobConfig("classify", k_max=args.k_max)
    rep = decay_report(io.load_tensor(args.coeffs), args.k_max)
    _emit_json(
        {
            "classification": rep.classification,
            "exponent": rep.exponent,
            "tail_exponent": rep.tail_exponent,
            "finitely_supported": rep.finitely_supported,
            "k_max": rep.k_max,
            "sums": {str(k): v for k, v in rep.sums.items()},
        },
        args.out,
    )
    return 0


def cmd_kernel_apply(args) -> int:
    out = kernel_apply(io.load_kernel(args.kernel), io.load_tensor(args.coeffs))
    io.dump_tensor(out, args.out)
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest()
    print(format_table(results))
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lagorth", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def points_opts(sp):
        sp.add_argument("--points", help="CSV with columns x1..xd")
        sp.add_argument("--grid", help="start:stop:num per axis, comma separated")
        sp.add_argument("--out", help="output CSV (default: stdout)")

    sp = sub.add_parser("nodes", help="print the tensor quadrature nodes to sample at")
    sp.add_argument("--rule", type=int, required=True)
    sp.add_argument("--dims", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_nodes)

    sp = sub.add_parser("analyze", help="Laguerre coefficients of sampled data or a named function")
    sp.add_argument("--input", help="CSV x1..xd,f sampled at the quadrature nodes")
    sp.add_argument("--fn", help="laguerre:n | expdecay:a | gaussian")
    sp.add_argument("--dims", type=int)
    sp.add_argument("--bounds", required=True)
    sp.add_argument("--rule", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("synth", help="evaluate a coefficient series")
    sp.add_argument("--coeffs", required=True)
    points_opts(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("eval-basis", help="evaluate a product Laguerre function")
    sp.add_argument("--n", required=True)
    points_opts(sp)
    sp.set_defaults(func=cmd_eval_basis)

    sp = sub.add_parser("convolve", help="coefficient-space convolution")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_convolve)

    sp = sub.add_parser("extend", help="evaluate the reflection extension of a named function")
    sp.add_argument("--fn", required=True)
    sp.add_argument("--dims", type=int)
    sp.add_argument("--order", type=int, default=4)
    sp.add_argument("--cutoff-width", type=float, default=1.0)
    sp.add_argument("--quality", help="write a JSON derivative-mismatch report here")
    points_opts(sp)
    sp.set_defaults(func=cmd_extend)

    sp = sub.add_parser("apply-e", help="apply the Laguerre operator")
    sp.add_argument("--coeffs")
    sp.add_argument("--fn")
    sp.add_argument("--dims", type=int)
    sp.add_argument("--power", type=int, default=1)
    points_opts(sp)
    sp.set_defaults(func=cmd_apply_e)

    sp = sub.add_parser("classify", help="decay classification of coefficients")
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--k-max", type=int, default=4)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("kernel-apply", help="apply a kernel coefficient matrix")
    sp.add_argument("--kernel", required=True)
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_kernel_apply)

    sp = sub.add_parser("selftest", help="run the built-in numerical checks")
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(func=cmd_selftest)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except io.InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
