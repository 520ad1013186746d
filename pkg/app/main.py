import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.api.geometry import run_geometry
from app.api.multipliers import run_multipliers
from app.api.series import run_series
from app.api.verify import run_verify
from app.api.voros import run_voros
from app.context import init_tower
from app.models.report import CheckResult
from app.models.run_config import RunConfig
from app.utils.errors import ExactWKBError
from config import settings

logger = logging.getLogger(__name__)

Handler = Callable[[RunConfig], Tuple[List, List[CheckResult]]]

COMMANDS: Dict[str, Handler] = {
    "series": run_series,
    "voros": run_voros,
    "geometry": run_geometry,
    "multipliers": run_multipliers,
    "verify-all": run_verify,
}


def configure_logging(level: Optional[str] = None) -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]  # Console output
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE, mode="a"))  # File output
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exact-wkb", description="Exact WKB toolkit for P_II with a large parameter")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="JSON config file; flags override its values")
        cmd.add_argument("--c", help='Parameter c, e.g. "i", "0.9i", "exp(3i*pi/5)"')
        cmd.add_argument("--t", help="Point t (default: on the ray through tau_1)")
        cmd.add_argument("--orders", help="K,N,n_max")
        cmd.add_argument("--n-max", dest="n_max", type=int, help="Highest Voros index")
        cmd.add_argument("--tol", type=float, help="Quadrature tolerance")
        cmd.add_argument("--out", help="Output directory")
        cmd.add_argument("--format", choices=["svg", "csv", "json"], help="Stokes graph format")
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--arg-c", dest="arg_c", type=float, help="Replace arg c, keeping |c|")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; the exit status is 0 iff every check passed."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    overrides = {key: getattr(args, key) for key in ("c", "t", "orders", "n_max", "tol", "out", "format", "seed", "arg_c")}
    try:
        config = RunConfig.load(args.config, overrides)
        init_tower()
        artifacts, checks = COMMANDS[args.command](config)
    except ExactWKBError as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 2
    for path in artifacts:
        logger.info(f"wrote {path}")
    failures = [check for check in checks if not check.passed]
    for check in failures:
        logger.error(f"check failed: {check.check} {check.params} (error={check.error}, tol={check.tol}) {check.detail or ''}")
    logger.info(f"{args.command}: {len(checks) - len(failures)}/{len(checks)} checks passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
