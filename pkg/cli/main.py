"""Entry point: parse arguments, configure logging, dispatch, map errors to exit codes."""

import logging
from typing import Optional, Sequence

from cli.commands import COMMANDS
from cli.parser import build_parser
from utils.errors import DaeviError
from utils.run_logger import RunLogger

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand.

    Returns:
        0 on success, 1 for usage/configuration errors, 2 for data/format
        errors, 3 for numerical failures
    """
    try:
        args = build_parser().parse_args(argv)
    except DaeviError as e:
        RunLogger.print_error(str(e), e.exit_code)
        return e.exit_code

    configure_logging(args.verbose, args.quiet)
    RunLogger.color = not args.no_color
    RunLogger.print_header(args.command)
    try:
        artifacts = COMMANDS[args.command](args)
    except DaeviError as e:
        logger.error(f"{args.command} failed: {e}")
        RunLogger.print_error(str(e), e.exit_code)
        RunLogger.print_footer(ok=False)
        return e.exit_code
    RunLogger.print_footer(ok=True, artifacts=artifacts)
    return 0
