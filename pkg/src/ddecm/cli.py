"""Command-line front end: ``ddecm run`` and ``ddecm validate``.

Exit codes: 0 success, 2 spectral hypothesis violated (no simple imaginary
pair, or other roots not strictly stable), 3 solvability failure, 4 oracle
mismatch, 5 input error.  Every failure prints one ``ddecm: error ...`` line
with ``key=value`` fields on stderr.
"""

import argparse
import sys
from pathlib import Path

from . import errors
from .perturbation import DEFAULT_EPS
from .pipeline import Tolerances, analyze
from .problem import load_problem
from .report import build_report, dumps, error_report, text_summary

__all__ = ["main", "build_parser", "exit_code_for", "EXIT_OK", "EXIT_HYPOTHESIS",
           "EXIT_SOLVABILITY", "EXIT_ORACLE", "EXIT_INPUT"]

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_SOLVABILITY = 3
EXIT_ORACLE = 4
EXIT_INPUT = 5

_EXIT_MAP = (
    (errors.OracleMismatch, EXIT_ORACLE),
    ((errors.SolvabilityDefect, errors.RegularizedSystemSingular), EXIT_SOLVABILITY),
    ((errors.HypothesisViolated, errors.NotOnAxis, errors.NoConvergence, errors.NotSimple,
      errors.NormalizationDegenerate, errors.ResonantSecondOrder, errors.EpsTooLarge),
     EXIT_HYPOTHESIS),
    ((errors.ProblemFileError, errors.DimensionMismatch), EXIT_INPUT),
)


def exit_code_for(exc):
    for types, code in _EXIT_MAP:
        if isinstance(exc, types):
            return code
    return EXIT_SOLVABILITY if isinstance(exc, errors.DDECMError) else EXIT_INPUT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _reason("usage", message)
        raise SystemExit(EXIT_INPUT)


def _reason(kind, message, **fields):
    extra = "".join(f" {k}={v}" for k, v in fields.items())
    flat = " ".join(str(message).split())
    print(f"ddecm: error kind={kind}{extra} message={flat!r}", file=sys.stderr)


def _eps_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("eps values must be positive")
    return vals


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return v


def build_parser():
    p = _Parser(prog="ddecm", description="Center-manifold coefficients of a delay "
                "differential system at a Hopf point.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="compute the coefficients and write a report")
    run.add_argument("--input", "-i", required=True, help="problem file (JSON)")
    run.add_argument("--output", "-o", help="report path (default: standard output)")
    run.add_argument("--format", choices=("json", "text"), default="json",
                     help="format written to --output or standard output")
    run.add_argument("--oracle", action="store_true", help="run the perturbation study")
    run.add_argument("--eps", type=_eps_list, help="comma-separated perturbation sizes")
    run.add_argument("--tol-root", type=_positive_float)
    run.add_argument("--tol-fredholm", type=_positive_float)
    run.add_argument("--scan-nodes", type=_positive_int)
    run.add_argument("--seed-basis", action="store_true",
                     help="include the unitary basis of the third-order solve")
    run.add_argument("--summary", action="store_true",
                     help="also print the text summary on standard error")

    val = sub.add_parser("validate", help="check a problem file without solving")
    val.add_argument("--input", "-i", required=True)
    return p


def _load(path):
    problem = load_problem(path)
    for w in problem.warnings:
        print(f"ddecm: warning {w}", file=sys.stderr)
    return problem


def _write(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_validate(args):
    problem = _load(args.input)
    print(f"ddecm: ok n={problem.system.n} r={problem.system.r!r}", file=sys.stderr)
    return EXIT_OK


def _cmd_run(args):
    problem = _load(args.input)
    try:
        tol = Tolerances.from_mapping(problem.tolerances)
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ProblemFileError(f"bad tolerances: {exc}") from None
    tol = tol.updated(tol_root=args.tol_root, tol_fredholm=args.tol_fredholm,
                      scan_nodes=args.scan_nodes)
    eps = args.eps or problem.oracle.get("eps") or DEFAULT_EPS
    oracle = args.oracle or bool(problem.oracle.get("enabled", False))

    code, analysis, failure = EXIT_OK, None, None
    try:
        analysis = analyze(problem.system, problem.omega_guess, tol, oracle=oracle, eps=eps)
    except errors.OracleMismatch as exc:
        analysis = getattr(exc, "analysis", None)
        code, failure = EXIT_ORACLE, exc
    if analysis is None:
        raise failure
    if args.format == "json":
        _write(dumps(build_report(analysis, include_basis=args.seed_basis)), args.output)
    else:
        _write(text_summary(analysis), args.output)
    if args.summary and args.format == "json":
        sys.stderr.write(text_summary(analysis))
    if failure is not None:
        _reason("OracleMismatch", failure, exit=code)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = _cmd_run if args.command == "run" else _cmd_validate
    try:
        return handler(args)
    except errors.DDECMError as exc:
        code = exit_code_for(exc)
        _reason(type(exc).__name__, exc, exit=code)
        if args.command == "run" and args.format == "json":
            _write(dumps(error_report(code, exc)), args.output)
        return code


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
