"""ingest and generate commands"""

import argparse
import logging

from pavecorpus.commands.common import add_manifest_args, add_provider_arg, pipeline_service

logger = logging.getLogger("pavecorpus.commands.pipeline")


def ingest(args: argparse.Namespace) -> int:
    service = pipeline_service(args)
    summary = service.ingest()
    for dataset in summary.datasets:
        logger.info(
            f"  {dataset.name} ({dataset.format}): {dataset.images} images, "
            f"{dataset.instances} instances, {len(dataset.skipped)} skipped"
        )
    return 1 if summary.error_count else 0


def generate(args: argparse.Namespace) -> int:
    service = pipeline_service(args)
    summary = service.run_generate()
    logger.info(f"Corpus written to {service.corpus.path} ({summary.written} records)")
    if summary.dropped:
        logger.warning(f"{len(summary.dropped)} record(s) dropped after failing QA twice")
    return 1 if summary.errors else 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("ingest", help="parse every dataset into the unified annotation store")
    add_manifest_args(parser)
    parser.set_defaults(handler=ingest)

    parser = subparsers.add_parser("generate", help="plan, generate and QA-gate the instruction corpus")
    add_manifest_args(parser)
    add_provider_arg(parser)
    parser.set_defaults(handler=generate)
