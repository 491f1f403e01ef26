"""stats command"""

import argparse
import logging

from pavecorpus.commands.common import add_manifest_args, pipeline_service
from pavecorpus.report.render import render_table

logger = logging.getLogger("pavecorpus.commands.report")


def stats(args: argparse.Namespace) -> int:
    service = pipeline_service(args)
    result = service.stats()
    print(render_table(result))
    logger.info(f"Statistics for {result.total_records} records written to {service.out_dir}")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("stats", help="tabulate corpus statistics as CSV and text")
    add_manifest_args(parser)
    parser.set_defaults(handler=stats)
