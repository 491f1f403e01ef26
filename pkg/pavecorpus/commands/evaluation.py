"""evaluate command"""

import argparse
import logging
import pathlib

from pavecorpus.commands.common import add_provider_arg
from pavecorpus.errors import ConfigError
from pavecorpus.evalkit.evaluator import METRIC_FAMILIES, parse_metric_selection
from pavecorpus.repos.manifest import load_manifest
from pavecorpus.services.evaluation_service import EvaluationService
from pavecorpus.services.pipeline_service import CORPUS_FILE

logger = logging.getLogger("pavecorpus.commands.evaluation")


def evaluate(args: argparse.Namespace) -> int:
    if args.corpus is None and args.manifest is None:
        raise ConfigError("evaluate needs --corpus or --manifest")
    out_dir = args.out
    corpus = args.corpus
    if args.manifest is not None:
        manifest = load_manifest(args.manifest)
        out_dir = out_dir or manifest.output_dir
        corpus = corpus or manifest.output_dir / CORPUS_FILE
    out_dir = out_dir or corpus.parent

    metrics = parse_metric_selection(args.metrics)
    service = EvaluationService(corpus, out_dir, args.predictions)
    report = service.run(metrics, args.provider)
    logger.info(f"Metrics written to {out_dir} (parsing rate {report.parsing_rate:.4f})")
    for error in report.errors:
        logger.error(error)
    return 1 if report.errors else 0


def setup(subparsers) -> None:
    parser = subparsers.add_parser("evaluate", help="score predictions against the corpus")
    parser.add_argument("--manifest", type=pathlib.Path, help="run manifest; locates the corpus and output dir")
    parser.add_argument("--corpus", type=pathlib.Path, help="corpus JSON-lines file")
    parser.add_argument("--predictions", type=pathlib.Path, help="predictions JSON-lines (default: reference answers)")
    parser.add_argument("--metrics", help=f"comma-separated subset of {','.join(METRIC_FAMILIES)}")
    parser.add_argument("--out", type=pathlib.Path, help="output directory for metrics.json / metrics.txt")
    add_provider_arg(parser)
    parser.set_defaults(handler=evaluate)
