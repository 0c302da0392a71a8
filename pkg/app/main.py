"""Command-line entrypoint: solve, spectrum, evolve, verify."""
import argparse
import logging
import sys
from pathlib import Path

# Project root (parent of app/)
_ROOT = Path(__file__).resolve().parent.parent

# Ensure project root is on path when run as: python app/main.py
if __name__ == "__main__" or "app" not in sys.modules:
    if str(_ROOT) not in sys.path:
        sys.path.insert(0, str(_ROOT))

from pydantic import ValidationError

from app.api.commands import cmd_evolve, cmd_solve, cmd_spectrum, cmd_verify, load_run_config
from app.core.config import get_settings
from app.core.errors import SolverError

_log = logging.getLogger(__name__)


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, get_settings().log_level, logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def create_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description="Liouvillian eigensystems of gain-free Lindblad models")
    sub = ap.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Write all eigenvalues with their block labels")
    solve.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    solve.add_argument("--out", help="Output file (default: config output.path or stdout)")

    spectrum = sub.add_parser("spectrum", help="Atomic emission spectrum as CSV (omega, s, S)")
    spectrum.add_argument("--config", required=True, type=Path)
    spectrum.add_argument("--omega-min", required=True, type=float)
    spectrum.add_argument("--omega-max", required=True, type=float)
    spectrum.add_argument("--points", required=True, type=int)
    spectrum.add_argument("--initial", default="excited_atom", help="ground, excited_atom or n,j")
    spectrum.add_argument("--out")

    evolve = sub.add_parser("evolve", help="Trace, purity and populations over time as CSV")
    evolve.add_argument("--config", required=True, type=Path)
    evolve.add_argument("--initial", required=True, help="ground, excited_atom or n,j")
    evolve.add_argument("--t-max", required=True, type=float)
    evolve.add_argument("--steps", required=True, type=int)
    evolve.add_argument("--out")

    verify = sub.add_parser("verify", help="Cross-check against the dense Liouvillian")
    verify.add_argument("--config", required=True, type=Path)
    return ap


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = create_parser().parse_args(argv)
    try:
        config = load_run_config(args.config)
        if args.command == "solve":
            return cmd_solve(config, args.out)
        if args.command == "spectrum":
            return cmd_spectrum(config, args.omega_min, args.omega_max, args.points, args.out, args.initial)
        if args.command == "evolve":
            return cmd_evolve(config, args.initial, args.t_max, args.steps, args.out)
        return cmd_verify(config)
    except SolverError as e:
        _log.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except ValidationError as e:
        _log.error("Invalid configuration %s:\n%s", args.config, e)
        return 2
    except OSError as e:
        _log.error("Cannot read or write file: %s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
