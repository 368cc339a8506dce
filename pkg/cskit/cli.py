"""cskit CLI - Main entry point."""

import argparse
import logging
import sys

from cskit import __version__
from cskit.algebras import BUILTINS, algebra_load_command, centralizer_command
from cskit.checks import SUITE_NAMES, check_command
from cskit.errors import (
    AlgebraDocumentError,
    ChartOverflowError,
    ConfigError,
    ContractError,
    DegenerateError,
    NoComplexStructureError,
    NumericalDriftError,
)
from cskit.isomaps import MAPS, iso_verify_command
from cskit.metrics import METRIC_GROUPS, metric_command, signature_command
from cskit.screws import SPACES, geodesic_command

log = logging.getLogger(__name__)

# Exception types and the exit code each maps to, checked in order
EXIT_CODES: list[tuple[type[BaseException] | tuple[type[BaseException], ...], int]] = [
    (ConfigError, 2),
    (AlgebraDocumentError, 4),
    (OSError, 4),
    ((ContractError, DegenerateError, NoComplexStructureError, ChartOverflowError, NumericalDriftError), 3),
]


def exit_code(error: BaseException) -> int | None:
    for types, code in EXIT_CODES:
        if isinstance(error, types):
            return code
    return None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cskit",
        allow_abbrev=False,
        description="Cartan-Schouten metrics, bundle groups, quaternionic covers and screws",
    )
    parser.add_argument(
        "-V",
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Log debug output to stderr",
    )
    parser.add_argument(
        "--format",
        choices=["json", "text", "csv"],
        help="Output format (default: from config, else json)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # Metric command
    metric_parser = subparsers.add_parser(
        "metric",
        help="Print a Cartan-Schouten metric with its signature",
    )
    metric_parser.add_argument(
        "group",
        choices=METRIC_GROUPS,
        help="Metric family",
    )
    for name in ("s", "t", "s1", "s2", "t1", "t2", "k1", "k2", "a", "b", "c", "d", "e", "m"):
        metric_parser.add_argument(f"--{name}", type=float, help=f"Family parameter {name}")
    metric_parser.add_argument(
        "--at",
        nargs=3,
        type=float,
        metavar=("X", "Y", "Z"),
        help="Chart point for h3 (default: origin)",
    )
    metric_parser.add_argument(
        "--basis",
        choices=["native", "sylvester"],
        default="native",
        help="Algebra basis for t* families (default: native)",
    )
    metric_parser.set_defaults(func=metric_command)

    # Signature command
    signature_parser = subparsers.add_parser(
        "signature",
        help="Signature and eigenvalues of a symmetric matrix",
    )
    signature_parser.add_argument(
        "matrix",
        help="JSON file or inline JSON (nested list or {\"matrix\": ...})",
    )
    signature_parser.set_defaults(func=signature_command)

    # Centralizer command
    centralizer_parser = subparsers.add_parser(
        "centralizer",
        help="Centralizer of the adjoint representation",
    )
    centralizer_parser.add_argument(
        "algebra",
        help=f"Built-in algebra ({', '.join(BUILTINS)}) or document path",
    )
    centralizer_parser.set_defaults(func=centralizer_command)

    # Iso-verify command
    iso_parser = subparsers.add_parser(
        "iso-verify",
        help="Check that a map is a group homomorphism",
    )
    iso_parser.add_argument(
        "map",
        choices=sorted(MAPS),
        help="Map name",
    )
    iso_parser.add_argument("--trials", type=int, help="Number of sampled pairs")
    iso_parser.add_argument("--seed", type=int, help="Random seed")
    iso_parser.set_defaults(func=iso_verify_command)

    # Geodesic command
    geodesic_parser = subparsers.add_parser(
        "geodesic",
        help="Sample the screw geodesic exp(t xi) as CSV",
    )
    geodesic_parser.add_argument(
        "space",
        choices=sorted(SPACES),
        help="Rigid-motion group",
    )
    geodesic_parser.add_argument("--omega", nargs=3, type=float, default=[0.0, 0.0, 0.0], metavar="W")
    geodesic_parser.add_argument("--v", nargs=3, type=float, default=[0.0, 0.0, 0.0], metavar="V")
    geodesic_parser.add_argument("--t0", type=float, default=0.0, help="Start time (default: 0)")
    geodesic_parser.add_argument("--t1", type=float, default=1.0, help="End time (default: 1)")
    geodesic_parser.add_argument("--steps", type=int, default=11, help="Number of samples (default: 11)")
    geodesic_parser.add_argument(
        "-o",
        "--out",
        help="CSV output file (default: stdout)",
    )
    geodesic_parser.set_defaults(func=geodesic_command)

    # Check command
    check_parser = subparsers.add_parser(
        "check",
        help="Run property suites",
    )
    check_parser.add_argument(
        "suite",
        choices=[*SUITE_NAMES, "all"],
        help="Suite to run",
    )
    check_parser.add_argument("--trials", type=int, help="Random trials per check")
    check_parser.add_argument("--seed", type=int, help="Random seed")
    check_parser.add_argument(
        "--tol",
        action="append",
        metavar="NAME=VALUE",
        help="Override a named tolerance (repeatable)",
    )
    check_parser.set_defaults(func=check_command)

    # Algebra-load command
    load_parser = subparsers.add_parser(
        "algebra-load",
        help="Load and validate an algebra document",
    )
    load_parser.add_argument(
        "file",
        help="JSON or YAML document",
    )
    load_parser.set_defaults(func=algebra_load_command)

    return parser


def main(argv: list[str] | None = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        sys.exit(2)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        args.func(args)
    except Exception as e:
        code = exit_code(e)
        if code is None:
            raise
        log.debug("%s failed", args.command, exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(code)


if __name__ == "__main__":
    main()
