"""irs-lab command line: one subcommand per experiment.

Exit codes: 0 when the run passes, 1 when a scientific check fails, 2 on usage errors.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from irs_lab.core.exceptions import (
    ConstructionError,
    DiscretenessCheckError,
    DomainNotStabilizedError,
    ExperimentConfigError,
    FrontierOverflowError,
    HyperbolicGeometryError,
    InconsistentCurveSystemError,
    RadiusMismatchError,
    RejectionStallError,
    TruncationIncompleteError,
    UnboundedRegionError,
)
from irs_lab.interfaces.cli.commands import COMMAND_HANDLERS
from irs_lab.interfaces.cli.config import COMMANDS, load_config
from irs_lab.settings import settings

logger = logging.getLogger("irs_lab")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

SCIENTIFIC_ERRORS = (
    ConstructionError,
    DiscretenessCheckError,
    DomainNotStabilizedError,
    FrontierOverflowError,
    HyperbolicGeometryError,
    InconsistentCurveSystemError,
    RadiusMismatchError,
    RejectionStallError,
    TruncationIncompleteError,
    UnboundedRegionError,
)

_HELP = {
    "area-check": "Compare cusp and funnel strip areas with their closed forms",
    "dirichlet": "Build, certify and draw a Dirichlet domain",
    "degenerate": "Estimate IRS functionals along a degenerating family",
    "chabauty-dist": "Snapshot distances and the convergence check along a family",
    "escape": "Push the base point into a cusp and watch the conjugates",
    "irs-estimate": "Estimate IRS functionals of fixed lattices",
    "fiber-bound": "Upper bound on distinct limit IRSs for a surface type",
    "collision": "Two curve systems with the same limit IRS",
}


def _pair(text: str) -> List[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'low,high', got {text!r}")
    return [float(p) for p in parts]


def _floats(text: str) -> List[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, default=None, help="INI file with [experiment] and per-command sections")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default: core count)")
    parser.add_argument("--output-dir", default=None, help="Directory for outputs")
    parser.add_argument("--group", dest="groups", action="append", default=None, help="Group fixture, repeatable")
    parser.add_argument("--family", default=None, help="Family name")
    parser.add_argument("--schedule", type=_floats, default=None, help="Comma-separated, strictly decreasing")
    parser.add_argument("--functional", dest="functionals", action="append", default=None, help="Test functional, repeatable")
    parser.add_argument("-n", type=int, default=None, help="Samples per estimate")
    parser.add_argument("--radius", type=float, default=None, help="Snapshot radius R")
    parser.add_argument("--delta", type=float, default=None, help="Cusp cut δ")
    parser.add_argument("--deltas", type=_floats, default=None, help="Cusp strip δ grid for area-check")
    parser.add_argument("--resolution", type=int, default=None, help="Quadrature grid for area-check")
    parser.add_argument("--tolerance", type=float, default=None, help="Relative tolerance for area-check")
    parser.add_argument("--epsilon", type=float, default=None, help="Matching tolerance of the convergence check")
    parser.add_argument("--margin", type=float, default=None, help="Inner-radius margin of snapshot distances")
    parser.add_argument("--steps", type=int, default=None, help="Unit steps into the cusp")
    parser.add_argument("--escape-radius", type=float, default=None, help="Snapshot radius of the escape run")
    parser.add_argument("--surface", default=None, help="Surface signature 'g,p'")
    parser.add_argument("--x-range", type=_pair, default=None, help="SVG viewport 'xmin,xmax'")
    parser.add_argument("--y-range", type=_pair, default=None, help="SVG viewport 'ymin,ymax'")
    parser.add_argument("--stroke-width", type=float, default=None, help="SVG stroke width")
    parser.add_argument("--csv", dest="csv_path", default=None, help="CSV output path")
    parser.add_argument("--json", dest="json_path", default=None, help="JSON output path")
    parser.add_argument("--svg", dest="svg_path", default=None, help="SVG output path")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="irs-lab", description="Numerical lab for invariant random subgroups of lattices in PSL(2,R)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=_HELP[command], description=_HELP[command])
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "config", "log_level"}
    return {key: value for key, value in vars(args).items() if key not in skip and value is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        logging.basicConfig(
            level=(args.log_level or settings.LOG_LEVEL).upper(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        config = load_config(args.command, args.config, _overrides(args))
        return COMMAND_HANDLERS[args.command](config)
    except (ExperimentConfigError, ValueError) as e:
        logger.error(f"{args.command}: {str(e)}")
        return EXIT_USAGE
    except SCIENTIFIC_ERRORS as e:
        logger.error(f"{args.command} failed: {str(e)}")
        return EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
