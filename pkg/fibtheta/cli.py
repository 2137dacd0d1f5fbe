"""
Command-line interface for fibtheta.

Usage:
    python -m fibtheta digits xi1 --digits 10
    python -m fibtheta verify --precision 40 --workers 4
    python -m fibtheta verify --check "thm1_*" --json
    python -m fibtheta probe --targets xi1,xi2 --degree 4 --height 100000000 --precision 300
    python -m fibtheta series --identity tp3 --order 200
"""

import argparse
import logging
import sys

from fibtheta import __version__
from fibtheta.checks import DEFAULT_PRECISION, run_all
from fibtheta.constants import CONSTANT_NAMES, evaluate_constant
from fibtheta.crosscheck import crosscheck_with_mpmath
from fibtheta.errors import SearchCancelled, UsageError, WorkbenchError
from fibtheta.exactnum import DecimalMode, render_decimal, render_scientific
from fibtheta.fibonacci import IndexConvention
from fibtheta.qseries import DEFAULT_ORDER, SERIES_IDENTITIES, verify_identity
from fibtheta.relations import minimal_polynomial_search, polynomial_relation_search
from fibtheta.report import write_json_lines, write_relation, write_text
from fibtheta.runner import RunStats

EXIT_USAGE = 3
EXIT_UNCERTIFIED = 2


class WorkbenchParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    parser = WorkbenchParser(
        prog="fibtheta",
        description="Certified workbench for Fibonacci infinite products and Jacobi theta values",
        epilog=(
            "Examples:\n"
            "  fibtheta digits xi1 --digits 10\n"
            "  fibtheta verify --precision 40\n"
            '  fibtheta verify --check "eq2_*" --json\n'
            "  fibtheta probe --targets xi1,xi2 --degree 2 --height 1000 --precision 60\n"
            "  fibtheta series --identity eq47chain --order 200\n"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", action="version", version=f"fibtheta {__version__}"
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true",
        help="Debug logging on stderr",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=WorkbenchParser)

    digits = sub.add_parser("digits", help="Print a certified decimal expansion")
    digits.add_argument(
        "constant", metavar="CONSTANT",
        help=f"One of: {', '.join(CONSTANT_NAMES)}",
    )
    digits.add_argument("--digits", "-n", type=int, required=True, help="Decimal places")
    digits.add_argument(
        "--convention", choices=[c.value for c in IndexConvention], default="standard",
        help="Fibonacci index convention (default: standard, F1 = F2 = 1)",
    )
    digits.add_argument(
        "--rounding", choices=[m.value for m in DecimalMode], default=DecimalMode.TRUNCATE.value,
        help="Truncate to the printed digits (default) or round to nearest",
    )
    digits.add_argument(
        "--crosscheck", action="store_true",
        help="Compare against an mpmath evaluation (stderr)",
    )

    verify = sub.add_parser("verify", help="Run registered identity checks")
    verify.add_argument("--check", "-c", metavar="NAME", help="Check name or shell pattern")
    verify.add_argument("--precision", "-p", type=int, default=DEFAULT_PRECISION,
                        help=f"Working precision in digits (default: {DEFAULT_PRECISION})")
    verify.add_argument("--order", type=int, default=DEFAULT_ORDER,
                        help=f"q-series order for series checks (default: {DEFAULT_ORDER})")
    verify.add_argument("--json", action="store_true", help="Newline-delimited JSON reports")
    verify.add_argument("--workers", "-w", type=int, default=1,
                        help="Worker processes (default: 1, 0 = auto)")
    verify.add_argument("--detail", action="store_true", help="Show both sides of each check")
    verify.add_argument("--quiet", "-q", action="store_true", help="No progress line")

    probe = sub.add_parser("probe", help="Integer relation search")
    probe.add_argument("--targets", required=True, help="One or two constants, comma separated")
    probe.add_argument("--degree", type=int, required=True, help="Maximum (total) degree")
    probe.add_argument("--height", type=int, required=True, help="Maximum coefficient size")
    probe.add_argument("--precision", type=int, required=True, help="Digits used for the search")
    probe.add_argument("--method", choices=["lll", "pslq"], default="lll",
                       help="Reduction algorithm (default: lll)")
    probe.add_argument("--json", action="store_true", help="JSON output")

    series = sub.add_parser("series", help="Formal q-series identity check")
    series.add_argument("--identity", required=True,
                        help=f"One of: {', '.join(sorted(SERIES_IDENTITIES))}")
    series.add_argument("--order", type=int, default=DEFAULT_ORDER,
                        help=f"Truncation order (default: {DEFAULT_ORDER})")

    return parser


def format_time(seconds: float) -> str:
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    elif seconds < 60:
        return f"{seconds:.1f}s"
    return f"{seconds / 60:.1f}m"


def progress_callback(stats: RunStats, quiet: bool = False) -> None:
    if quiet:
        return
    sys.stderr.write(
        f"\r  Checks: {stats.completed}/{stats.total}  |  "
        f"Failed: {stats.failures}  |  "
        f"Elapsed: {format_time(stats.elapsed)}  "
    )
    sys.stderr.flush()


def cmd_digits(args) -> int:
    value = evaluate_constant(args.constant, args.digits, IndexConvention(args.convention))
    rendered = render_decimal(value, args.digits, DecimalMode(args.rounding))
    print(rendered.text)
    if args.crosscheck:
        c = crosscheck_with_mpmath(args.constant, value, args.digits,
                                   shifted=args.convention == "shifted")
        if c["error"] is None:
            verdict = "agrees" if c["agrees"] else "DISAGREES"
            print(f"  mpmath: {c['mpmath_value']} ({verdict})", file=sys.stderr)
        else:
            print(f"  mpmath cross-check failed ({c['error']})", file=sys.stderr)
    if not rendered.certified:
        print(f"Not certified to {args.digits} digits (radius {render_scientific(value.radius)}).",
              file=sys.stderr)
        return EXIT_UNCERTIFIED
    return 0


def cmd_verify(args) -> int:
    show_progress = not (args.quiet or args.json)
    summary = run_all(
        args.precision, args.order, pattern=args.check, workers=args.workers,
        on_progress=lambda stats: progress_callback(stats, not show_progress),
    )
    if show_progress:
        sys.stderr.write("\n")
    if args.json:
        write_json_lines(summary.reports, sys.stdout)
    else:
        write_text(summary, sys.stdout, detailed=args.detail)
    return summary.exit_code


def cmd_probe(args) -> int:
    targets = [t.strip() for t in args.targets.split(",") if t.strip()]
    if not 1 <= len(targets) <= 2:
        raise UsageError("probe takes one or two targets.")
    # 20 spare digits keep every radius well below 10^-precision
    values = [evaluate_constant(t, args.precision + 20) for t in targets]
    try:
        if len(values) == 1:
            result = minimal_polynomial_search(values[0], args.degree, args.height,
                                               args.precision, method=args.method)
        else:
            result = polynomial_relation_search(values[0], values[1], args.degree, args.height,
                                                args.precision, method=args.method)
    except KeyboardInterrupt:
        raise SearchCancelled("Search interrupted.") from None
    write_relation(result, sys.stdout, as_json=args.json)
    return 0


def cmd_series(args) -> int:
    result = verify_identity(args.identity, args.order)
    if result.passed:
        print(f"{result.name}: all coefficients agree to order {result.order}")
        return 0
    print(
        f"{result.name}: link {result.failing_link} differs at q^{result.first_mismatch} "
        f"(difference {result.difference})"
    )
    return 1


COMMANDS = {
    "digits": cmd_digits,
    "verify": cmd_verify,
    "probe": cmd_probe,
    "series": cmd_series,
}


def main(argv: list[str] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except WorkbenchError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
