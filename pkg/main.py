"""
Inverse problems for Dirac systems with rational Weyl functions.
Command-line entry point.
"""
from dotenv import load_dotenv

load_dotenv()

import argparse
import sys
from typing import List, Optional

import structlog

from src import __version__
from src.cli import commands
from src.config.logging_config import configure_logging
from src.config.settings import settings
from src.models.schemas import Convention

logger = structlog.get_logger()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirac-inverse",
        description="Explicit inverse problems for skew-selfadjoint Dirac systems (continuous and discrete).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Override LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_common(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--output-dir", default=None, help=f"Output directory (default {settings.output_dir})")

    # invert-continuous
    sub = subparsers.add_parser("invert-continuous", help="Recover v(x) from a continuous realization")
    sub.add_argument("input", help="Realization JSON")
    sub.add_argument("--grid", default=None, help="Sample grid a:b:N (default 0:x_max:grid_samples)")
    sub.add_argument("--reduce", action="store_true", help="Reduce a non-minimal realization")
    sub.add_argument("--method", choices=["hamiltonian", "newton"], default="hamiltonian")
    add_common(sub)
    sub.set_defaults(handler=commands.cmd_invert_continuous)

    # invert-discrete
    sub = subparsers.add_parser("invert-discrete", help="Recover {C_k} from a discrete realization")
    sub.add_argument("input", help="Realization JSON")
    sub.add_argument("--K", type=int, default=None, help="Number of C_k (default max(5n+20, 50))")
    sub.add_argument("--reduce", action="store_true")
    sub.add_argument("--allow-i-in-spectrum", action="store_true", help="Proceed with a warning when i is in sigma(alpha)")
    sub.add_argument("--method", choices=["hamiltonian", "newton"], default="hamiltonian")
    add_common(sub)
    sub.set_defaults(handler=commands.cmd_invert_discrete)

    # verify
    sub = subparsers.add_parser("verify", help="Finite-horizon Weyl defect checks")
    sub.add_argument("input", help="Realization JSON (or quadruple JSON with --quadruple)")
    sub.add_argument("--quadruple", action="store_true", help="Input is a quadruple document")
    sub.add_argument("--mode", choices=[c.value for c in Convention], default=None)
    sub.add_argument("--z", nargs="+", default=None, help="Spectral points, e.g. 2i 3i 4i")
    sub.add_argument("--K", type=int, default=None, help="Discrete prefix length")
    sub.add_argument("--verify-K", type=int, default=None, help="Discrete summation horizon")
    sub.add_argument("--L", type=float, default=None, help="Continuous horizon")
    sub.add_argument("--step", type=float, default=None, help="Continuous step h")
    sub.add_argument("--phi-offset", type=float, default=0.0, help="Add to phi[0, 0] (contrast runs)")
    sub.add_argument("--reduce", action="store_true")
    sub.add_argument("--allow-i-in-spectrum", action="store_true")
    add_common(sub)
    sub.set_defaults(handler=commands.cmd_verify)

    # stability
    sub = subparsers.add_parser("stability", help="Perturbation sweep with trend verdict")
    sub.add_argument("input", help="SweepConfig JSON")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    add_common(sub)
    sub.set_defaults(handler=commands.cmd_stability)

    # corpus
    sub = subparsers.add_parser("corpus", help="Run the example corpus")
    sub.add_argument("--corpus-dir", default=None, help=f"Corpus directory (default {settings.corpus_dir})")
    sub.add_argument("--case", nargs="*", default=None, help="Only these case names")
    add_common(sub)
    sub.set_defaults(handler=commands.cmd_corpus)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse usage errors are schema errors
        return 2 if e.code else 0

    configure_logging(args.log_level or settings.log_level, settings.log_json)
    logger.info("pipeline_startup", version=__version__, environment=settings.environment, seed=settings.seed)

    try:
        return args.handler(args)
    except Exception as e:
        logger.error("unhandled_exception", command=args.command, error=str(e), type=type(e).__name__)
        return 1


if __name__ == "__main__":
    sys.exit(main())
