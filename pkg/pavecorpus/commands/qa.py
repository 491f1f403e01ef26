"""validate, review-export and review-merge commands"""

import argparse
import logging
import pathlib

from pavecorpus.commands.common import add_manifest_args, pipeline_service
from pavecorpus.qa.codes import describe

logger = logging.getLogger("pavecorpus.commands.qa")


def validate(args: argparse.Namespace) -> int:
    result = pipeline_service(args).validate()
    for code, count in sorted(result.failure_histogram.items()):
        logger.warning(f"  {code}: {count} ({describe(code)})")
    for report in sorted(result.failed, key=lambda r: r.record_id):
        for code, message in report.failures:
            logger.warning(f"  {report.record_id}: {code}: {message}")
    if result.pass_rate is None:
        logger.info("Corpus is empty")
        return 0
    logger.info(f"Pass rate {result.pass_rate:.4f} ({result.passed}/{result.total})")
    return 0 if result.passed == result.total else 1


def review_export(args: argparse.Namespace) -> int:
    written, short = pipeline_service(args).review_export(args.per_stratum, args.seed)
    logger.info(f"Wrote {len(written)} review files ({short} strata under {args.per_stratum} records)")
    return 0


def review_merge(args: argparse.Namespace) -> int:
    count = pipeline_service(args).review_merge(args.verdicts)
    logger.info(f"Merged {count} verdicts into the corpus")
    return 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="run the QA checks over the corpus")
    add_manifest_args(parser)
    parser.set_defaults(handler=validate)

    parser = subparsers.add_parser("review-export", help="export a stratified sample for expert review")
    add_manifest_args(parser)
    parser.add_argument("--per-stratum", type=int, default=5, help="records per task category x answer format")
    parser.set_defaults(handler=review_export)

    parser = subparsers.add_parser("review-merge", help="attach id,verdict,notes review results to the corpus")
    add_manifest_args(parser)
    parser.add_argument("--verdicts", type=pathlib.Path, required=True, help="verdicts CSV")
    parser.set_defaults(handler=review_merge)
