"""Routes each predicted record to its task family's metrics and groups the results"""

import asyncio
import logging
from collections import defaultdict
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from pavecorpus.errors import (
    ConfigError,
    EmptyCandidate,
    EmptyPredictionSet,
    EvaluationError,
    GenerationError,
    UnknownRecordId,
)
from pavecorpus.evalkit.generation import bleu4, cider, rouge_l
from pavecorpus.evalkit.grounding import (
    DEFAULT_IOU_THRESHOLD,
    detection_scores,
    exact_localization,
    localization_ious,
    match_detections,
)
from pavecorpus.evalkit.judge import JUDGE_RUBRIC_VERSION, judge_score, summarize_judgements
from pavecorpus.evalkit.parsing import is_parsable, parse_prediction
from pavecorpus.evalkit.region import field_accuracy, normalize_exact
from pavecorpus.evalkit.regression import regression_scores
from pavecorpus.evalkit.tokenize import TOKENIZER_VERSION, tokenize
from pavecorpus.evalkit.vqa import vqa_accuracy
from pavecorpus.genkit.provider import Provider
from pavecorpus.models.annotation import BoxAbs
from pavecorpus.models.evaluation import MatchResult, MetricReport, PredictionRecord
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord
from pavecorpus.taxonomy import CAPTION_TASKS, CLASSIFICATION_TASKS, REGION_TASKS

logger = logging.getLogger("pavecorpus.evalkit.evaluator")

METRIC_FAMILIES = ("grounding", "classification", "region", "vqa", "regression", "generation", "judge")
DEFAULT_METRICS = tuple(m for m in METRIC_FAMILIES if m != "judge")


def route(record: InstructionRecord) -> str:
    """Metric family scoring a record's final answer, chosen by the task that answer closes"""
    task = record.closing_task
    if task in REGION_TASKS:
        return "region"
    if record.answer_format is AnswerFormat.COORDINATES:
        return "grounding"
    if task in CLASSIFICATION_TASKS:
        return "classification"
    if record.answer_format in (AnswerFormat.SHORT_ANSWER, AnswerFormat.MULTIPLE_CHOICE):
        return "vqa"
    if record.answer_format is AnswerFormat.NUMERIC:
        return "regression"
    if task in CAPTION_TASKS:
        return "generation"
    return "judge"


def routes(record: InstructionRecord) -> Tuple[str, ...]:
    """Every family a record feeds; conversations are also judged as a whole"""
    family = route(record)
    if record.multi_turn and family != "judge":
        return (family, "judge")
    return (family,)


def predictions_from_corpus(records: Iterable[InstructionRecord]) -> List[PredictionRecord]:
    """Reference answers rendered as predictions, the upper bound for every metric"""
    return [PredictionRecord(record_id=r.record_id, raw_text=r.final_answer) for r in records]


def parse_metric_selection(value: Optional[str]) -> List[str]:
    if not value:
        return list(DEFAULT_METRICS)
    selected = [m.strip() for m in value.split(",") if m.strip()]
    unknown = [m for m in selected if m not in METRIC_FAMILIES]
    if unknown:
        raise ConfigError(f"unknown metric(s) {unknown}; choose from {', '.join(METRIC_FAMILIES)}")
    return selected


# =========================================================
# FAMILIES
# =========================================================

def _grounding(pairs, tau: float) -> Dict[str, Any]:
    total = MatchResult()
    exact = 0
    localization: List[float] = []
    for record, pred in pairs:
        gts = [BoxAbs.from_list(b) for b in record.ground_truth.get("boxes") or []]
        boxes = [lb.box for lb in pred.parsed.boxes]
        match = match_detections(boxes, gts, tau)
        total = total + match
        exact += exact_localization(match)
        localization.extend(localization_ious(boxes, gts))
    scores = detection_scores(total)
    return {
        "precision": scores.precision,
        "recall": scores.recall,
        "f1": scores.f1,
        "mean_iou": scores.mean_iou,
        "mean_localization_iou": float(np.mean(localization)) if localization else 0.0,
        "accuracy": exact / len(pairs),
        "tp": total.tp,
        "fp": total.fp,
        "fn": total.fn,
        "n": len(pairs),
    }


def _classification(pairs) -> Dict[str, Any]:
    by_task: Dict[str, List[bool]] = defaultdict(list)
    for record, pred in pairs:
        answer = pred.parsed.answer if pred.parsed.answer is not None else pred.raw_text
        truth = record.ground_truth.get("answer") or ""
        by_task[record.closing_task].append(normalize_exact(answer) == normalize_exact(truth))
    hits = [hit for values in by_task.values() for hit in values]
    result: Dict[str, Any] = {"accuracy": sum(hits) / len(hits), "n": len(hits)}
    for task in sorted(by_task):
        result[f"{task}_accuracy"] = sum(by_task[task]) / len(by_task[task])
    return result


def _region(pairs) -> Dict[str, Any]:
    preds = {record.record_id: pred.parsed.fields for record, pred in pairs}
    gts = {
        record.record_id: {f: record.ground_truth.get(f) for f in ("distress", "severity", "repair")}
        for record, _ in pairs
    }
    result: Dict[str, Any] = {"n": len(pairs)}
    for field in ("distress", "severity", "repair"):
        result[f"{field}_accuracy"] = field_accuracy(preds, gts, field)
    return result


def _vqa(pairs) -> Dict[str, Any]:
    preds: Dict[str, str] = {}
    gts: Dict[str, str] = {}
    for record, pred in pairs:
        if record.answer_format is AnswerFormat.MULTIPLE_CHOICE:
            preds[record.record_id] = pred.parsed.choice or ""
            gts[record.record_id] = record.ground_truth.get("choice") or ""
        else:
            preds[record.record_id] = pred.parsed.answer if pred.parsed.answer is not None else pred.raw_text
            gts[record.record_id] = record.ground_truth.get("answer") or ""
    scores = vqa_accuracy(preds, gts)
    return {"exact": scores.exact, "relaxed": scores.relaxed, "n": len(pairs)}


def _regression(pairs) -> Dict[str, Any]:
    preds, gts = [], []
    for record, pred in pairs:
        if pred.parsed.pci is not None:
            preds.append(pred.parsed.pci)
            gts.append(float(record.ground_truth["pci"]))
    result = regression_scores(preds, gts).to_dict() if gts else {"mae": None, "mse": None, "rmse": None, "r2": None}
    result["n"] = len(pairs)
    result["unparsed"] = len(pairs) - len(gts)
    return result


def _generation(pairs, errors: List[str]) -> Dict[str, Any]:
    candidates = [tokenize(pred.raw_text) for _, pred in pairs]
    references = [[tokenize(record.final_answer)] for record, _ in pairs]
    bleu_scores = []
    for candidate, refs in zip(candidates, references):
        try:
            bleu_scores.append(bleu4(candidate, refs))
        except EmptyCandidate:
            bleu_scores.append(0.0)
    rouge_scores = [rouge_l(c, refs[0]) for c, refs in zip(candidates, references)]
    result: Dict[str, Any] = {
        "bleu4": float(np.mean(bleu_scores)),
        "rouge_l": float(np.mean(rouge_scores)),
        "cider": None,
        "n": len(pairs),
    }
    try:
        result["cider"] = cider(candidates, references).corpus
    except EvaluationError as e:
        errors.append(f"generation: {e}")
        logger.warning(f"CIDEr skipped: {e}")
    return result


async def _judge(pairs, provider: Provider, errors: List[str]) -> Dict[str, Any]:
    async def score(record: InstructionRecord, pred: PredictionRecord):
        try:
            return await judge_score(record.final_question, pred.raw_text, record.final_answer, provider)
        except (EvaluationError, GenerationError) as e:
            errors.append(f"judge: {record.record_id}: {e}")
            logger.warning(f"Judge failed for {record.record_id}: {e}")
            return None

    results = await asyncio.gather(*(score(record, pred) for record, pred in pairs))
    summary = summarize_judgements([r for r in results if r is not None])
    summary["n"] = len(pairs)
    return summary


# =========================================================
# ENTRY POINT
# =========================================================

async def evaluate(
    corpus: Mapping[str, InstructionRecord],
    predictions: Sequence[PredictionRecord],
    metrics: Optional[Sequence[str]] = None,
    judge_provider: Optional[Provider] = None,
    tau: float = DEFAULT_IOU_THRESHOLD,
) -> MetricReport:
    """Score predictions against the corpus they were produced for.

    Every prediction id must exist in the corpus. A metric family that cannot run
    (judge without a provider, CIDEr on a single image) is reported in `errors`
    while the other families are still computed.
    """
    if not predictions:
        raise EmptyPredictionSet("prediction file has no records")
    unknown = [p.record_id for p in predictions if p.record_id not in corpus]
    if unknown:
        raise UnknownRecordId(f"{len(unknown)} prediction id(s) not in corpus, e.g. {unknown[:3]}")

    selected = list(metrics) if metrics is not None else list(DEFAULT_METRICS)
    report = MetricReport()
    seen = set()
    families: Dict[str, list] = defaultdict(list)
    parse_inputs = []
    unscored = 0
    for pred in predictions:
        if pred.record_id in seen:
            logger.warning(f"Duplicate prediction for {pred.record_id}; keeping the first")
            continue
        seen.add(pred.record_id)
        record = corpus[pred.record_id]
        parsed = PredictionRecord(pred.record_id, pred.raw_text, parse_prediction(pred.raw_text))
        record_families = routes(record)
        for family in record_families:
            families[family].append((record, parsed))
        if not any(f in selected and (f != "judge" or judge_provider is not None) for f in record_families):
            unscored += 1
        parse_inputs.append((record.closing_task, record.answer_format, pred.raw_text))

    report.parsing_rate = sum(1 for t, f, raw in parse_inputs if is_parsable(t, f, raw)) / len(parse_inputs)
    if unscored:
        logger.warning(f"{unscored} prediction(s) feed only metric families that are not selected or cannot run")

    if "grounding" in selected and families["grounding"]:
        report.perception["grounding"] = _grounding(families["grounding"], tau)
    if "classification" in selected and families["classification"]:
        report.perception["classification"] = _classification(families["classification"])
    if "region" in selected and families["region"]:
        report.understanding["region"] = _region(families["region"])
    if "vqa" in selected and families["vqa"]:
        report.understanding["vqa"] = _vqa(families["vqa"])
    if "regression" in selected and families["regression"]:
        report.understanding["regression"] = _regression(families["regression"])
    if "generation" in selected and families["generation"]:
        report.explanatory["generation"] = _generation(families["generation"], report.errors)
    if "judge" in selected:
        if judge_provider is None:
            message = "judge metrics need a provider (--provider mock or remote with PROVIDER_URL/PROVIDER_API_KEY)"
            report.errors.append(f"judge: {ConfigError(message)}")
            logger.error(message)
        elif families["judge"]:
            report.explanatory["judge"] = await _judge(families["judge"], judge_provider, report.errors)

    report.metadata = {
        "tokenizer": TOKENIZER_VERSION,
        "bleu_smoothing": "add-one for n>=2",
        "cider_scale": 1,
        "iou_threshold": tau,
        "judge_rubric": JUDGE_RUBRIC_VERSION,
        "metrics": selected,
        "n_predictions": len(parse_inputs),
        "unscored_predictions": unscored,
        "records_per_family": {name: len(pairs) for name, pairs in sorted(families.items()) if pairs},
    }
    logger.info(f"Evaluated {len(parse_inputs)} predictions ({len(report.errors)} metric error(s))")
    return report
