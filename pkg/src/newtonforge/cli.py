"""Command-line interface.

Every subcommand prints one JSON object (or CSV rows ``n,value,normalized``
for sequences). Exit status is 0 on success, 1 on domain errors such as
region violations or pole hits, and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import mpmath

from . import __version__
from .acceptance import CRITERIA, bessel_sequence, run_all
from .differences import (
    asymptotic_profile,
    backward_difference,
    binomial_sum,
    central_difference,
    difference_table,
    forward_difference,
)
from .euler import acceleration_report, euler_transform
from .functions.decomposition import RootFindingError
from .functions.handles import MissingSignalError, UnknownFunctionError, lookup
from .functions.laplace import ImproperFunctionError
from .functions.rational import ExpressionError, PoleError
from .newton import build_newton_series, eval_newton_series
from .numerics import ENV_PRECISION, PrecisionError, PrecisionPolicy, Scalar
from .oracles import (
    RegionError,
    fourier_central_oracle,
    fourier_forward_oracle,
    laplace_difference_oracle,
    region_membership,
)
from .quadrature import QuadratureError

DOMAIN_ERRORS = (RegionError, PoleError, MissingSignalError, PrecisionError, QuadratureError,
                 RootFindingError, ImproperFunctionError, ZeroDivisionError)
USAGE_ERRORS = (ExpressionError, UnknownFunctionError, ValueError)

NAMED_CONSTANTS = {"ln2": lambda: mpmath.log(2), "pi": lambda: mpmath.pi, "e": lambda: mpmath.e}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _json_number(x):
    x = float(x)
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    return x


def scalar_payload(value: Scalar, diagnostics: dict | None = None) -> dict:
    out = {"value": str(value), "exact": value.is_exact}
    if not value.is_exact:
        out["precision_bits"] = value.precision_bits
    if diagnostics is not None:
        out["diagnostics"] = diagnostics
    return out


def dump_json(payload) -> str:
    return json.dumps(payload, ensure_ascii=True, allow_nan=False, separators=(", ", ": "))


def dump_csv(values: Sequence[Scalar], normalized: Sequence) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "value", "normalized"])
    for n, (v, w) in enumerate(zip(values, normalized)):
        writer.writerow([n, str(v), mpmath.nstr(w, 17)])
    return buf.getvalue()


def _normalized(values: Sequence[Scalar]) -> list:
    return [mpmath.ldexp(v.magnitude(), -n) for n, v in enumerate(values)]


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _scalar(text: str) -> Scalar:
    try:
        return Scalar.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _reference(text: str, prec: int = 320) -> Scalar:
    key = text.strip().lower()
    if key in NAMED_CONSTANTS:
        with mpmath.workprec(prec):
            return Scalar.floating(NAMED_CONSTANTS[key](), prec)
    return _scalar(text)


def _policy(args) -> PrecisionPolicy:
    if args.precision:
        return PrecisionPolicy.parse(args.precision)
    return PrecisionPolicy.default()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_diff(args, policy):
    op = {"forward": forward_difference, "backward": backward_difference,
          "central": central_difference}[args.kind]
    value = op(lookup(args.f), _scalar(args.z), _scalar(args.h), args.n, policy)
    return scalar_payload(value)


def cmd_sum(args, policy):
    value = binomial_sum(lookup(args.f), _scalar(args.y), _scalar(args.h), args.n, args.variant, policy)
    return scalar_payload(value)


def cmd_table(args, policy):
    table = difference_table(lookup(args.f), _scalar(args.z), _scalar(args.h), args.n_max, policy)
    values = table.leading()
    if args.format == "csv":
        return dump_csv(values, _normalized(values))
    return {"value": [[str(x) for x in row] for row in table.rows], "exact": table.exact,
            **({} if table.exact else {"precision_bits": table.precision_bits})}


def cmd_newton(args, policy):
    series = build_newton_series(lookup(args.f), _scalar(args.z0), args.max_terms, policy)
    value, diag = eval_newton_series(series, _scalar(args.eval), args.tol)
    d = diag.as_dict()
    d["last_term_mag"] = _json_number(d["last_term_mag"])
    d["threshold"] = _json_number(d["threshold"])
    if d["majorant_tail"] is not None:
        d["majorant_tail"] = _json_number(d["majorant_tail"])
    return scalar_payload(value, d)


def cmd_euler(args, policy):
    f = lookup(args.f)
    if args.reference is None:
        report = euler_transform(f, args.n_terms, policy)
    else:
        report = acceleration_report(f, _reference(args.reference), args.n_terms, policy)
    if args.format == "csv":
        values = report.accel_partials
        return dump_csv(values, _normalized(values))
    diagnostics = {"raw_partial": str(report.raw_partials[-1]), "n_terms": args.n_terms}
    if report.reference is not None:
        diagnostics["accel_error"] = mpmath.nstr(report.accel_errors[-1], 17)
        diagnostics["raw_error"] = mpmath.nstr(report.raw_errors[-1], 17)
        diagnostics["rate_ratio"] = None if report.rate_ratio is None else _json_number(report.rate_ratio)
    return scalar_payload(report.accel_partials[-1], diagnostics)


def cmd_oracle(args, policy):
    f = lookup(args.f)
    z, h = _scalar(args.z), _scalar(args.h)
    diagnostics = {}
    if args.kind == "laplace":
        signal = f.laplace_signal
        if signal is None:
            raise MissingSignalError(f"{f.name} has no inverse Laplace transform")
        result = laplace_difference_oracle(signal[0], signal[1], z, h, args.n, tol=args.tol)
        direct = forward_difference(f, z, h, args.n, policy)
    elif args.kind == "fourier-forward":
        result = fourier_forward_oracle(f, z, h, args.n, tol=args.tol)
        direct = forward_difference(f, z, h, args.n, policy)
    else:
        result = fourier_central_oracle(f, z, h, args.n, tol=args.tol)
        direct = central_difference(f, z, h, args.n, policy)
        diagnostics["product_form"] = str(result.product_form.value)
        diagnostics["form_discrepancy"] = _json_number(result.discrepancy)
    diagnostics.update({
        "est_error": _json_number(result.est_error),
        "evaluations": result.evaluations,
        "direct": str(direct),
        "abs_gap": _json_number((result.value - direct).magnitude()),
    })
    return scalar_payload(result.value, diagnostics)


def cmd_region(args, policy):
    verdict = region_membership(lookup(args.f), _scalar(args.z))
    return {"value": verdict.membership, "exact": verdict.abscissa_used.is_exact,
            "diagnostics": {"abscissa": str(verdict.abscissa_used)}}


def cmd_bessel(args, policy):
    values = bessel_sequence(args.n_max)
    if args.format == "csv":
        return dump_csv(values, _normalized(values))
    report = asymptotic_profile(values)
    evidence = {k: (v if isinstance(v, int) else mpmath.nstr(v, 17)) for k, v in report.evidence.items()}
    return {"value": report.verdict, "exact": False, "diagnostics": evidence}


def cmd_verify(args, policy):
    selection = None
    if args.only:
        try:
            selection = {int(x) for x in args.only.split(",")}
        except ValueError as exc:
            raise UsageError(f"--only takes comma-separated criterion numbers, got {args.only!r}") from exc
        unknown = selection - set(CRITERIA)
        if unknown:
            raise UsageError(f"unknown criteria {sorted(unknown)}")
    results = []
    for r in run_all(selection):
        results.append(r)
        if args.format != "json":
            print(r.line(), flush=True)
    failed = [r.number for r in results if not r.passed]
    if args.format == "json":
        payload = {"value": "pass" if not failed else "fail", "exact": True,
                   "diagnostics": {str(r.number): {"passed": r.passed, "detail": r.detail,
                                                   "seconds": round(r.seconds, 3)} for r in results}}
        return payload, (1 if failed else 0)
    return None, (1 if failed else 0)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", help=f"auto | auto:GUARD | exact | BITS (default: ${ENV_PRECISION} or auto)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=1e-10, help="tolerance (default 1e-10)")

    parser = argparse.ArgumentParser(prog="newtonforge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    parser.subcommands = {}

    def add(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        parser.subcommands[name] = p
        return p

    p = add("diff", "forward, backward or central difference of order n")
    p.add_argument("--f", required=True, help="catalog name or rational expression in z")
    p.add_argument("--kind", choices=("forward", "backward", "central"), default="forward")
    p.add_argument("--z", required=True)
    p.add_argument("--h", default="1")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_diff)

    p = add("sum", "plus-sign binomial sum sum_k C(n,k) f(node_k)")
    p.add_argument("--f", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--h", default="1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=("forward", "backward", "central"), default="forward")
    p.set_defaults(run=cmd_sum)

    p = add("table", "difference table; CSV streams Delta^n f(z) for n = 0..n-max")
    p.add_argument("--f", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--h", default="1")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(run=cmd_table)

    p = add("newton", "evaluate the Newton series of f centred at z0")
    p.add_argument("--f", required=True)
    p.add_argument("--z0", required=True)
    p.add_argument("--eval", required=True, metavar="Z")
    p.add_argument("--max-terms", type=int, default=500)
    p.set_defaults(run=cmd_newton)

    p = add("euler", "Euler transformation of sum_n (-1)^n f(n)")
    p.add_argument("--f", required=True)
    p.add_argument("--n-terms", type=int, required=True)
    p.add_argument("--reference", help="known limit: a number or one of ln2, pi, e")
    p.set_defaults(run=cmd_euler)

    p = add("oracle", "difference from an integral transform oracle, with the direct sum")
    p.add_argument("--f", required=True)
    p.add_argument("--kind", choices=("laplace", "fourier-forward", "fourier-central"), default="laplace")
    p.add_argument("--z", required=True, help="evaluation point (y for the Fourier kinds)")
    p.add_argument("--h", default="1")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_oracle)

    p = add("region", "absolute Laplace convergence membership of z")
    p.add_argument("--f", required=True)
    p.add_argument("--z", required=True)
    p.set_defaults(run=cmd_region)

    p = add("bessel", "a_n = sum_k C(n,k)(-1)^k / sqrt(k^2+1) and its asymptotic profile")
    p.add_argument("--n-max", type=int, default=2000)
    p.set_defaults(run=cmd_bessel)

    p = add("verify", "run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(run=cmd_verify)
    return parser


def _usage_failure(parser: argparse.ArgumentParser, command: str | None, message: str) -> int:
    target = parser.subcommands.get(command, parser)
    target.print_usage(sys.stderr)
    print(f"{target.prog}: error: {message}", file=sys.stderr)
    return 2


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("n", "n_max", "n_terms", "max_terms"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            return _usage_failure(parser, args.command, f"--{name.replace('_', '-')} must be non-negative")
    try:
        policy = _policy(args)
        result = args.run(args, policy)
    except UsageError as exc:
        return _usage_failure(parser, args.command, str(exc))
    except DOMAIN_ERRORS as exc:
        print(f"newtonforge {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except USAGE_ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        return _usage_failure(parser, args.command, str(message))
    code = 0
    if isinstance(result, tuple):
        result, code = result
    if result is None:
        return code
    if isinstance(result, str):
        sys.stdout.write(result)
    else:
        if args.format == "csv":
            return _usage_failure(parser, args.command, "this command has no CSV form")
        sys.stdout.write(dump_json(result) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
