"""Evaluation service: score a prediction file against a generated corpus"""

import asyncio
import json
import logging
import pathlib
from typing import List, Optional, Sequence

from pavecorpus.errors import ConfigError, PaveCorpusError
from pavecorpus.evalkit.evaluator import evaluate, predictions_from_corpus
from pavecorpus.genkit.provider import make_provider
from pavecorpus.models.evaluation import MetricReport, PredictionRecord
from pavecorpus.report.render import render_metric_table
from pavecorpus.repos.jsonl_store import CorpusRepository, PredictionRepository

logger = logging.getLogger("pavecorpus.services.evaluation_service")

METRICS_JSON_FILE = "metrics.json"
METRICS_TABLE_FILE = "metrics.txt"


class EvaluationService:
    """Loads corpus and predictions, runs the evaluator and writes the grouped report"""

    def __init__(
        self,
        corpus_path: pathlib.Path,
        out_dir: pathlib.Path,
        predictions_path: Optional[pathlib.Path] = None,
    ):
        self.corpus = CorpusRepository(corpus_path)
        self.predictions = PredictionRepository(predictions_path) if predictions_path else None
        self.out_dir = pathlib.Path(out_dir)

    def _load_predictions(self, corpus) -> List[PredictionRecord]:
        if self.predictions is None:
            logger.info("No prediction file given; scoring the corpus's own answers")
            return predictions_from_corpus(corpus.values())
        if not self.predictions.exists:
            raise PaveCorpusError(f"prediction file {self.predictions.path} does not exist")
        return self.predictions.read_all()

    async def evaluate(
        self,
        metrics: Optional[Sequence[str]] = None,
        provider_name: Optional[str] = None,
    ) -> MetricReport:
        if not self.corpus.exists:
            raise PaveCorpusError(f"corpus {self.corpus.path} does not exist")
        corpus = self.corpus.index()
        predictions = self._load_predictions(corpus)

        provider = None
        report_errors = []
        if metrics is not None and "judge" in metrics and provider_name:
            try:
                provider = make_provider(provider_name)
            except ConfigError as e:
                logger.error(f"Judge provider unavailable: {e}")
                report_errors.append(f"judge: {e}")
        try:
            report = await evaluate(corpus, predictions, metrics, judge_provider=provider)
        finally:
            if provider is not None:
                await provider.close()
        if report_errors:
            # the evaluator's generic judge message is superseded by the provider's own
            report.errors = report_errors + [e for e in report.errors if not e.startswith("judge: ")]

        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / METRICS_JSON_FILE).write_text(
            json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        (self.out_dir / METRICS_TABLE_FILE).write_text(render_metric_table(report), encoding="utf-8")
        return report

    def run(self, metrics: Optional[Sequence[str]] = None, provider_name: Optional[str] = None) -> MetricReport:
        return asyncio.run(self.evaluate(metrics, provider_name))
