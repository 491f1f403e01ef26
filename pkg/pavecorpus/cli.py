"""Command-line entry point; subcommands come from the modules in COMMAND_MODULES"""

import argparse
import importlib
import logging
import sys
from typing import List, Optional

from pavecorpus import settings
from pavecorpus.errors import PaveCorpusError

logger = logging.getLogger("pavecorpus.cli")

COMMAND_MODULES = (
    "pavecorpus.commands.pipeline",
    "pavecorpus.commands.qa",
    "pavecorpus.commands.report",
    "pavecorpus.commands.evaluation",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pavecorpus",
        description="Pavement annotation to instruction-corpus toolchain and evaluation harness",
    )
    parser.add_argument("--quiet", action="store_true", help="hide progress bars")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_MODULES:
        importlib.import_module(name).setup(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings.setup_logging()
    try:
        return args.handler(args)
    except PaveCorpusError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    except OSError as e:
        logger.error(f"{args.command} failed: {e.filename or ''}: {e.strerror or e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
