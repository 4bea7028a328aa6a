"""Command-line entry point."""

import argparse
import json
import logging
import sys
from pathlib import Path

from quasispin import __version__
from quasispin.config import get_settings
from quasispin.physics.base import ConfigError, DynamicsError, QuasispinError
from quasispin.scenario.config import apply_overrides, load_config, read_raw, validate_config
from quasispin.scenario.runner import Subcommand, run_scenario

logger = logging.getLogger(__name__)


def configure_logging() -> None:
    settings = get_settings()
    log_level = logging.DEBUG if settings.debug else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stdout,
        force=True,
    )
    # Reduce noise from third-party libraries
    logging.getLogger("joblib").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasispin",
        description="Quasispin splitters on bipartite tight-binding chains",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for subcommand in Subcommand:
        sub = commands.add_parser(subcommand.value, help=f"run the {subcommand.value} scenario")
        sub.add_argument("config", type=Path, help="scenario JSON file")
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="PATH=VALUE",
            help="override a config field, e.g. packet.kick=0.7 (repeatable)",
        )
        sub.add_argument("--seed", type=int, default=None, help="random seed (required for disorder)")
        sub.add_argument("--output", type=Path, default=None, help="output root directory")

    validate = commands.add_parser("validate", help="list config violations without running")
    validate.add_argument("config", type=Path)
    validate.add_argument("--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE")
    return parser


def _error_payload(error: QuasispinError) -> dict[str, object]:
    details: object = None
    if isinstance(error, ConfigError):
        details = error.violations
    elif isinstance(error, DynamicsError):
        details = error.diagnostics
    return {"error": type(error).__name__, "message": str(error), "details": details}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()

    try:
        raw = apply_overrides(read_raw(args.config), args.overrides)
        if args.command == "validate":
            violations = validate_config(raw)
            print(json.dumps({"violations": violations}, indent=2))
            return 1 if violations else 0

        if args.command == Subcommand.DISORDER.value and args.seed is None and raw.get("seed") is None:
            raise ConfigError("disorder runs need --seed", ["seed: required for disorder"])
        config = load_config(raw)
        run = run_scenario(args.command, config, seed=args.seed, output=args.output)
        print(run.path)
        return 0
    except QuasispinError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(json.dumps(_error_payload(e), default=str), file=sys.stderr)
        return 2
    except Exception:
        logger.exception("Unexpected failure")
        return 1


if __name__ == "__main__":
    sys.exit(main())
