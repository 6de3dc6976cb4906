"""Command-line interface: forward, invert, noise, bench.

Exit status 0 on success, 2 on input or usage errors, 3 when an inversion
stage fails (the error code, e.g. ``order-overestimate``, goes to stderr).
"""

from __future__ import annotations

import argparse
import sys
import warnings

import mpmath
import numpy as np

from . import bench, inversion
from .errors import InversionError, MomentError, ParseError, SingularMatrixError
from .forward import double_moments_domain, moments, moments_curve
from .models import (
    ComplexMomentSequence,
    DiskUnion,
    DoubleMomentTable,
    MomentSequence,
    ParamCurve,
    PolynomialModel,
    SpikeTrain,
)
from .textio import read_file, serialize

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INVERSION = 3

MODEL_INPUT = {
    "polynomial": MomentSequence,
    "rational": MomentSequence,
    "spikes": MomentSequence,
    "polygon": ComplexMomentSequence,
    "qdomain": DoubleMomentTable,
}


class UsageError(Exception):
    pass


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _format_value(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, (str, bool, int, np.integer)) or v is None:
        return str(v)
    if isinstance(v, complex) and v.imag != 0:
        return f"{float(v.real)!r}{float(v.imag):+}j"
    return repr(float(v.real if isinstance(v, complex) else v))


def format_report(items: dict) -> str:
    """Two-column tab-separated report with a ``key\\tvalue`` header."""
    lines = ["key\tvalue"] + [f"{k}\t{_format_value(v)}" for k, v in items.items()]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- verbs


def cmd_forward(args) -> int:
    model = read_file(args.input)
    K = args.order
    if isinstance(model, (MomentSequence, ComplexMomentSequence, DoubleMomentTable)):
        raise UsageError("forward needs a model file, got moment data")
    if args.dps is not None and not isinstance(model, (PolynomialModel, SpikeTrain)):
        raise UsageError("--dps applies to polynomial and spikes models only")
    if isinstance(model, ParamCurve):
        out = moments_curve(model, K, 1 if args.order2 is None else args.order2)
    elif isinstance(model, DiskUnion):
        out = double_moments_domain(model, K, K if args.order2 is None else args.order2)
    else:
        out = moments(model, K, dps=args.dps)
    _emit(serialize(out), args.out)
    return EXIT_OK


def _detect_order(m, n_max, report):
    if n_max < 1:
        return None
    n = inversion.estimate_order(m, n_max)
    report["order_detected"] = "none" if n is None else n
    return n


def cmd_invert(args) -> int:
    data = read_file(args.input)
    expected = MODEL_INPUT[args.model]
    if not isinstance(data, expected):
        raise UsageError(f"--model {args.model} needs {expected.__name__} input, got {type(data).__name__}")
    report = {"model": args.model}
    n = args.order
    if args.model == "polynomial":
        n = len(data) - 1 if n is None else n
        result = inversion.invert_polynomial(data, n, dps=args.dps, tol=args.tol, report=report)
    elif args.model == "rational":
        if n is None:
            raise UsageError("--model rational needs --order")
        result = inversion.invert_rational(data, n, tol=max(args.tol, 1e-7), report=report)
    elif args.model == "spikes":
        detected = _detect_order(data, (len(data) - 1) // 2, report)
        if n is None:
            if detected is None:
                raise UsageError("could not detect the order; pass --order")
            n = detected
        result = inversion.prony(data, n, dps=args.dps, tol=args.tol, report=report)
    elif args.model == "polygon":
        if n is None:
            raise UsageError("--model polygon needs --order")
        result, weights = inversion.invert_polygon(data, n, dps=args.dps, tol=max(args.tol, 1e-6), report=report)
        report["davis_weights"] = list(weights)
    else:
        N_max = min(data.shape) - 1 if n is None else n
        nodes, result = inversion.invert_quadrature_domain(data, N_max, report=report)
        report["nodes"] = list(nodes)
    report["order"] = n if n is not None else report.get("order")
    report["tolerance"] = args.tol
    _emit(serialize(result), args.out)
    report_text = format_report(report)
    if args.report is not None:
        _emit(report_text, args.report)
    else:
        sys.stderr.write(report_text)
    return EXIT_OK


def add_noise(data, sigma: float, seed: int):
    """Zero-mean Gaussian noise of standard deviation sigma * max |entry| on every entry."""
    if sigma < 0:
        raise UsageError("--sigma must be >= 0")
    if sigma == 0:
        return data
    rng = np.random.default_rng(seed)
    if isinstance(data, MomentSequence):
        scale = max(abs(float(v)) for v in data.values)
        eps = rng.normal(0.0, sigma * scale, len(data))
        if data.dps is not None:
            with mpmath.workdps(data.dps):
                vals = tuple(v + mpmath.mpf(float(e)) for v, e in zip(data.values, eps))
        else:
            vals = tuple(float(v) + float(e) for v, e in zip(data.values, eps))
        return MomentSequence(vals, data.interval, data.dps)
    if isinstance(data, ComplexMomentSequence):
        v = data.as_array()
        s = sigma * float(np.max(np.abs(v)))
        return ComplexMomentSequence(tuple(v + rng.normal(0, s, v.shape) + 1j * rng.normal(0, s, v.shape)))
    if isinstance(data, DoubleMomentTable):
        e = data.entries
        s = sigma * float(np.max(np.abs(e)))
        return DoubleMomentTable(e + rng.normal(0, s, e.shape) + 1j * rng.normal(0, s, e.shape))
    raise UsageError(f"noise applies to moment data, got {type(data).__name__}")


def cmd_noise(args) -> int:
    data = read_file(args.input)
    _emit(serialize(add_noise(data, args.sigma, args.seed)), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.suite not in bench.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(bench.SUITES)}")
    columns, rows = bench.run_suite(args.suite, args.seed)
    _emit(bench.format_table(columns, rows), args.out)
    worst = max(r["residual"] for r in rows)
    total = sum(r["runtime_s"] for r in rows)
    summary = f"{args.suite}: {len(rows)} instances, max residual {worst:.3e}, total runtime {total:.3f} s"
    if "ratio" in columns:
        ratios = [r["ratio"] for r in rows]
        summary += f", lambda_min/asymptote in [{min(ratios):.4f}, {max(ratios):.4f}]"
    # the table goes to stdout when --out is absent, so keep the summary apart
    (sys.stderr if args.out is None else sys.stdout).write(summary + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol", type=float, default=1e-8, help="acceptance tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    parser = _Parser(prog="momentrecon", description="Moments of signal models and reconstruction from moments.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("forward", parents=[common], help="compute moments of a model file")
    p.add_argument("input")
    p.add_argument("--order", type=int, required=True, help="highest moment index K")
    p.add_argument("--order2", type=int, help="highest conj(z) index L for double moments")
    p.add_argument("--dps", type=int, help="decimal digits for extended-precision moments")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("invert", parents=[common], help="reconstruct a model from a moments file")
    p.add_argument("input")
    p.add_argument("--model", required=True, choices=sorted(MODEL_INPUT))
    p.add_argument("--order", type=int, help="model order (degree, spike or vertex count, N_max)")
    p.add_argument("--dps", type=int, help="decimal digits for extended-precision solves")
    p.add_argument("--report", help="report path (default: stderr)")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("noise", parents=[common], help="add seeded Gaussian noise to moments")
    p.add_argument("input")
    p.add_argument("--sigma", type=float, required=True, help="noise level relative to max |moment|")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("bench", parents=[common], help="run a benchmark suite")
    p.add_argument("suite", help=", ".join(bench.SUITES))
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except InversionError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INVERSION
    except SingularMatrixError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INVERSION
    except (UsageError, ParseError, MomentError, OSError) as exc:
        code = getattr(exc, "code", "input-error")
        print(f"error: {code}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
