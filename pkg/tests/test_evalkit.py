import asyncio
import itertools
import random

import pytest

from conftest import make_annotation, make_instance
from pavecorpus.errors import (
    ConfigError,
    CorpusTooSmall,
    EmptyCandidate,
    EmptyInput,
    EmptyPredictionSet,
    JudgeParseError,
    LengthMismatch,
    UnknownRecordId,
    UnpairedRecord,
)
from pavecorpus.evalkit import (
    bleu4,
    cider,
    detection_scores,
    evaluate,
    field_accuracy,
    levenshtein_similarity,
    match_detections,
    parse_judge_reply,
    parse_metric_selection,
    parsing_rate,
    predictions_from_corpus,
    regression_scores,
    rouge_l,
    route,
    routes,
    tokenize,
    vqa_accuracy,
    word_count,
)
from pavecorpus.evalkit.evaluator import DEFAULT_METRICS
from pavecorpus.evalkit.generation import lcs_length
from pavecorpus.evalkit.judge import judge_score, summarize_judgements
from pavecorpus.evalkit.region import edit_distance, field_match
from pavecorpus.evalkit.vqa import exact_match, relaxed_match
from pavecorpus.genkit import MockProvider, build_multiturn, generate_record
from pavecorpus.harmonize import iou
from pavecorpus.models.annotation import BoxAbs
from pavecorpus.models.evaluation import JUDGE_DIMENSIONS, MatchResult, PredictionRecord
from pavecorpus.models.instruction import AnswerFormat, LengthVariant


def _edit_distance_oracle(a: str, b: str) -> int:
    row = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        previous, row[0] = row[0], i
        for j, cb in enumerate(b, 1):
            previous, row[j] = row[j], min(row[j] + 1, row[j - 1] + 1, previous + (ca != cb))
    return row[-1]


def _judge_json(score: float) -> str:
    body = ", ".join(f'"{dim}": {score}' for dim in JUDGE_DIMENSIONS)
    return f'{{"score": {score}, {body}}}'


# =========================================================
# REGION
# =========================================================

def test_edit_distance_matches_reference_dp():
    words = ["".join(p) for n in range(6) for p in itertools.product("abc", repeat=n)]
    for a, b in itertools.combinations(words, 2):
        assert edit_distance(a, b) == _edit_distance_oracle(a, b), (a, b)


@pytest.mark.parametrize("a, b, expected", [
    ("kitten", "sitting", 4 / 7),
    ("longitudinal crack", "longitudinal cracking", 6 / 7),
    ("pothole", "manhole", 4 / 7),
    ("", "", 1.0),
    ("Alligator Crack", "alligatorcrack", 0.8),
])
def test_levenshtein_similarity(a, b, expected):
    assert levenshtein_similarity(a, b) == pytest.approx(expected)


def test_field_match_rules():
    assert field_match("Medium", "medium", "severity")
    assert not field_match("Med", "medium", "severity")
    assert field_match("longitudinal cracking", "longitudinal crack", "distress")
    assert not field_match("pothole", "manhole", "distress")
    assert field_match("Alligator Crack", "alligatorcrack", "distress")
    assert not field_match(None, "pothole", "distress")


def test_field_accuracy():
    preds = {"a": {"distress": "pothole", "severity": "high"}, "b": {"distress": "patch"}}
    gts = {"a": {"distress": "pothole", "severity": "High"}, "b": {"distress": "rutting", "severity": None}}
    assert field_accuracy(preds, gts, "distress") == 0.5
    assert field_accuracy(preds, gts, "severity") == 1.0
    assert field_accuracy(preds, gts, "repair") is None
    with pytest.raises(UnpairedRecord):
        field_accuracy({"a": {}}, gts, "distress")
    with pytest.raises(ValueError):
        field_accuracy(preds, gts, "colour")


def test_parsing_rate():
    preds = [
        ("pci_assessment", "numeric", "Estimated PCI: 41"),
        ("pci_assessment", "numeric", "Looks fair."),
        ("dense_region_description", "descriptive", "Distress: pothole\nRepair: patching"),
        ("dense_region_description", "descriptive", "Distress: pothole"),
    ]
    assert parsing_rate(preds) == 0.5
    with pytest.raises(EmptyPredictionSet):
        parsing_rate([])


# =========================================================
# GROUNDING
# =========================================================

def _exhaustive_tp(preds, gts, tau):
    """Best one-to-one hit count over every assignment"""
    small, large = (preds, gts) if len(preds) <= len(gts) else (gts, preds)
    best = 0
    for perm in itertools.permutations(range(len(large)), len(small)):
        best = max(best, sum(1 for s, l in enumerate(perm) if iou(small[s], large[l]) >= tau))
    return best


def test_one_prediction_claims_the_best_ground_truth():
    pred = BoxAbs(0, 0, 10, 10)
    gts = [BoxAbs(0, 0, 10, 6), BoxAbs(0, 0, 10, 5.5)]
    match = match_detections([pred], gts)
    assert (match.tp, match.fp, match.fn) == (1, 0, 1)
    assert match.matched_ious == pytest.approx((0.6,))
    assert _exhaustive_tp([pred], gts, 0.5) == 1


def test_greedy_counts_are_consistent():
    rng = random.Random(21)
    for _ in range(200):
        def box():
            x, y = rng.uniform(0, 80), rng.uniform(0, 80)
            return BoxAbs(x, y, x + rng.uniform(5, 20), y + rng.uniform(5, 20))
        preds = [box() for _ in range(rng.randint(0, 4))]
        gts = [box() for _ in range(rng.randint(0, 4))]
        match = match_detections(preds, gts)
        assert match.tp + match.fp == len(preds)
        assert match.tp + match.fn == len(gts)
        assert match.tp <= _exhaustive_tp(preds, gts, 0.5)
        assert all(v >= 0.5 for v in match.matched_ious)


def test_detection_scores():
    zero = detection_scores(MatchResult())
    assert (zero.precision, zero.recall, zero.f1, zero.mean_iou) == (0.0, 0.0, 0.0, 0.0)
    half = detection_scores(MatchResult(tp=1, fp=1, fn=1, matched_ious=(0.7,)))
    assert (half.precision, half.recall, half.f1) == pytest.approx((0.5, 0.5, 0.5))
    assert half.mean_iou == pytest.approx(0.7)


def test_threshold_range():
    with pytest.raises(ValueError):
        match_detections([BoxAbs(0, 0, 1, 1)], [BoxAbs(0, 0, 1, 1)], tau=0.0)
    with pytest.raises(ValueError):
        match_detections([BoxAbs(0, 0, 1, 1)], [BoxAbs(0, 0, 1, 1)], tau=1.5)


# =========================================================
# TEXT GENERATION
# =========================================================

def test_tokenize():
    assert tokenize("Crack, 12px wide!") == ["crack", ",", "12px", "wide", "!"]
    assert word_count("Crack, 12px wide!") == 3


def test_bleu_anchors():
    reference = tokenize("the pothole near the curb is deep and wide")
    assert bleu4(reference, [reference]) == pytest.approx(1.0)
    assert bleu4(tokenize("the pothole near the curb"), [reference]) < 1.0
    assert bleu4(tokenize("green grass grows"), [reference]) == 0.0
    with pytest.raises(EmptyCandidate):
        bleu4([], [reference])


def test_rouge_l():
    assert lcs_length(["a", "b", "c"], ["a", "c"]) == 2
    assert rouge_l(["a", "b", "c"], ["a", "c"]) == pytest.approx(0.8299, abs=1e-4)
    assert rouge_l(["x"], ["a", "c"]) == 0.0


def test_cider_anchors():
    refs = [[["a", "b", "c", "d"]], [["e", "f", "g", "h"]]]
    same = cider([["a", "b", "c", "d"], ["e", "f", "g", "h"]], refs)
    assert same.per_image == pytest.approx((1.0, 1.0))
    assert same.corpus == pytest.approx(1.0)
    disjoint = cider([["x", "y"], ["z"]], refs)
    assert disjoint.corpus == 0.0


def test_cider_input_checks():
    with pytest.raises(CorpusTooSmall):
        cider([["a"]], [[["a"]]])
    with pytest.raises(LengthMismatch):
        cider([["a"], ["b"]], [[["a"]]])


# =========================================================
# VQA AND REGRESSION
# =========================================================

def test_vqa_matching():
    assert exact_match("Yes.", "yes")
    assert not exact_match("yes, severe alligator cracking", "yes")
    assert relaxed_match("yes, severe alligator cracking", "yes")
    assert not exact_match("pothole", "manhole")
    assert not relaxed_match("pothole", "manhole")


def test_vqa_accuracy():
    scores = vqa_accuracy({"a": "Yes.", "b": "yes, badly", "c": "pothole"}, {"a": "yes", "b": "yes", "c": "manhole"})
    assert scores.exact == pytest.approx(1 / 3)
    assert scores.relaxed == pytest.approx(2 / 3)
    with pytest.raises(UnpairedRecord):
        vqa_accuracy({"a": "yes"}, {"b": "yes"})


def test_regression_anchor():
    scores = regression_scores([50, 60], [40, 70])
    assert (scores.mae, scores.mse, scores.rmse) == pytest.approx((10.0, 100.0, 10.0))
    assert scores.n == 2


def test_regression_r2():
    gts = [10.0, 40.0, 70.0, 95.0]
    assert regression_scores(gts, gts).r2 == pytest.approx(1.0)
    mean = sum(gts) / len(gts)
    assert regression_scores([mean] * 4, gts).r2 == pytest.approx(0.0)
    assert regression_scores([1.0, 2.0], [5.0, 5.0]).r2 is None


def test_regression_identities():
    rng = random.Random(2)
    for _ in range(50):
        gts = [rng.uniform(0, 100) for _ in range(8)]
        preds = [rng.uniform(0, 100) for _ in range(8)]
        scores = regression_scores(preds, gts)
        assert scores.rmse ** 2 == pytest.approx(scores.mse, rel=1e-12)
        assert scores.mae <= scores.rmse + 1e-12


def test_regression_input_checks():
    with pytest.raises(LengthMismatch):
        regression_scores([1.0], [1.0, 2.0])
    with pytest.raises(EmptyInput):
        regression_scores([], [])


# =========================================================
# JUDGE
# =========================================================

def test_parse_judge_reply():
    result = parse_judge_reply(_judge_json(8))
    assert result.score == 8.0
    assert result.passed
    assert set(result.dimension_scores) == set(JUDGE_DIMENSIONS)


def test_judge_reply_wrapped_in_prose():
    result = parse_judge_reply(f"Here is my grading:\n```json\n{_judge_json(6)}\n```\nThanks.")
    assert result.score == 6.0
    assert not result.passed


@pytest.mark.parametrize("text", [
    "no json here",
    '{"score": 8}',
    _judge_json(11),
    _judge_json(0),
])
def test_bad_judge_replies(text):
    with pytest.raises(JudgeParseError):
        parse_judge_reply(text)


def test_judge_mean_and_pass_rate():
    results = [
        asyncio.run(judge_score("q", "a", "ref", MockProvider(judge_score=8.0))),
        asyncio.run(judge_score("q", "a", "ref", MockProvider(judge_score=6.0))),
    ]
    summary = summarize_judgements(results)
    assert summary["judge_mean"] == pytest.approx(7.0)
    assert summary["judge_pass_rate"] == 0.5
    assert summary["judge_n"] == 2
    assert summary["judge_dimensions"]["completeness"] == pytest.approx(7.0)


def test_judge_gives_up_after_retries():
    provider = MockProvider(fixed_reply="I refuse to grade.")
    with pytest.raises(JudgeParseError):
        asyncio.run(judge_score("q", "a", "ref", provider))
    assert provider.calls == 3


# =========================================================
# EVALUATOR
# =========================================================

def _self_eval_corpus(plain_annotation, severity_annotation, pci_annotation):
    other_pci = make_annotation(image_ref="dsps24/s9.jpg", dims=(1920, 1080), pci=85.0, source_dataset="dsps24")
    jobs = [
        (plain_annotation, "single_object_grounding"),
        (severity_annotation, "multi_object_enumeration"),
        (severity_annotation, "severity_classification"),
        (pci_annotation, "condition_classification"),
        (plain_annotation, "dense_region_description"),
        (severity_annotation, "attribute_grounding"),
        (pci_annotation, "quick_assessment"),
        (plain_annotation, "distress_identification"),
        (pci_annotation, "pci_assessment"),
        (other_pci, "pci_assessment"),
        (plain_annotation, "scene_summarization"),
        (severity_annotation, "multi_length_caption"),
    ]
    records = [asyncio.run(generate_record(a, task, LengthVariant.MEDIUM)) for a, task in jobs]
    records.append(asyncio.run(build_multiturn(severity_annotation, 3, "chain_of_thought")))
    return {r.record_id: r for r in records}


def test_route_by_task_family(plain_annotation, pci_annotation):
    grounding = asyncio.run(generate_record(plain_annotation, "single_object_grounding", LengthVariant.SHORT))
    pci = asyncio.run(generate_record(pci_annotation, "pci_assessment", LengthVariant.SHORT))
    region = asyncio.run(generate_record(plain_annotation, "dense_region_description", LengthVariant.SHORT))
    multi = asyncio.run(build_multiturn(pci_annotation, 2, "quick_assessment"))
    assert [route(r) for r in (grounding, pci, region, multi)] == ["grounding", "regression", "region", "vqa"]
    assert routes(grounding) == ("grounding",)
    assert routes(multi) == ("vqa", "judge")


def test_conversations_scored_by_closing_task(severity_annotation, pci_annotation):
    records = [
        asyncio.run(build_multiturn(severity_annotation, 3, "single_object_grounding")),
        asyncio.run(build_multiturn(pci_annotation, 2, "pci_assessment")),
    ]
    corpus = {r.record_id: r for r in records}
    report = asyncio.run(evaluate(corpus, predictions_from_corpus(records)))
    assert report.errors == []
    assert report.perception["grounding"]["n"] == 1
    assert report.perception["grounding"]["f1"] == pytest.approx(1.0)
    assert report.understanding["regression"]["n"] == 1
    assert report.understanding["regression"]["mae"] == 0.0
    assert report.metadata["unscored_predictions"] == 0
    assert report.metadata["records_per_family"]["judge"] == 2


def test_judge_only_records_counted_as_unscored(severity_annotation):
    record = asyncio.run(build_multiturn(severity_annotation, 3, "chain_of_thought"))
    assert routes(record) == ("judge",)
    report = asyncio.run(evaluate({record.record_id: record}, predictions_from_corpus([record])))
    assert report.errors == []
    assert report.metadata["unscored_predictions"] == 1
    judged = asyncio.run(evaluate(
        {record.record_id: record},
        predictions_from_corpus([record]),
        metrics=["judge"],
        judge_provider=MockProvider(judge_score=8.0),
    ))
    assert judged.metadata["unscored_predictions"] == 0
    assert judged.explanatory["judge"]["n"] == 1


def test_self_evaluation_is_perfect(plain_annotation, severity_annotation, pci_annotation):
    corpus = _self_eval_corpus(plain_annotation, severity_annotation, pci_annotation)
    report = asyncio.run(evaluate(
        corpus,
        predictions_from_corpus(corpus.values()),
        metrics=list(DEFAULT_METRICS) + ["judge"],
        judge_provider=MockProvider(judge_score=9.0),
    ))
    assert report.errors == []
    assert report.parsing_rate == 1.0
    assert report.perception["grounding"]["f1"] == pytest.approx(1.0)
    assert report.perception["grounding"]["accuracy"] == 1.0
    assert report.perception["classification"]["accuracy"] == 1.0
    assert report.understanding["region"]["distress_accuracy"] == 1.0
    assert report.understanding["region"]["repair_accuracy"] == 1.0
    assert report.understanding["vqa"]["exact"] == 1.0
    assert report.understanding["regression"]["mae"] == 0.0
    assert report.understanding["regression"]["r2"] == pytest.approx(1.0)
    assert report.explanatory["generation"]["bleu4"] == pytest.approx(1.0)
    assert report.explanatory["generation"]["cider"] == pytest.approx(1.0)
    assert report.explanatory["judge"]["judge_mean"] == 9.0
    assert report.metadata["iou_threshold"] == 0.5


def test_shifted_box_misses_at_default_threshold():
    annotation = make_annotation(instances=[make_instance("pothole", (0, 0, 10, 10))])
    record = asyncio.run(generate_record(annotation, "single_object_grounding", LengthVariant.SHORT))
    report = asyncio.run(evaluate(
        {record.record_id: record},
        [PredictionRecord(record.record_id, "pothole [5, 0, 15, 10]")],
    ))
    grounding = report.perception["grounding"]
    assert (grounding["tp"], grounding["fp"], grounding["fn"]) == (0, 1, 1)
    assert grounding["mean_localization_iou"] == pytest.approx(1 / 3)


def test_judge_without_provider_is_reported(pci_annotation):
    record = asyncio.run(build_multiturn(pci_annotation, 2, "quick_assessment"))
    report = asyncio.run(evaluate(
        {record.record_id: record},
        predictions_from_corpus([record]),
        metrics=["judge"],
    ))
    assert "judge" not in report.explanatory
    assert len(report.errors) == 1
    assert report.errors[0].startswith("judge:")


def test_single_caption_skips_cider(plain_annotation):
    record = asyncio.run(generate_record(plain_annotation, "scene_summarization", LengthVariant.SHORT))
    report = asyncio.run(evaluate({record.record_id: record}, predictions_from_corpus([record])))
    assert report.explanatory["generation"]["cider"] is None
    assert report.errors and report.errors[0].startswith("generation:")


def test_prediction_set_checks(pci_annotation):
    record = asyncio.run(generate_record(pci_annotation, "pci_assessment", LengthVariant.SHORT))
    corpus = {record.record_id: record}
    with pytest.raises(EmptyPredictionSet):
        asyncio.run(evaluate(corpus, []))
    with pytest.raises(UnknownRecordId):
        asyncio.run(evaluate(corpus, [PredictionRecord("missing", "Estimated PCI: 40")]))


def test_metric_selection():
    assert parse_metric_selection(None) == list(DEFAULT_METRICS)
    assert "judge" not in DEFAULT_METRICS
    assert parse_metric_selection("grounding, vqa") == ["grounding", "vqa"]
    with pytest.raises(ConfigError):
        parse_metric_selection("grounding,bogus")


def test_answer_format_of_routed_records(pci_annotation):
    record = asyncio.run(generate_record(pci_annotation, "condition_classification", LengthVariant.SHORT))
    assert record.answer_format is AnswerFormat.SHORT_ANSWER
    assert route(record) == "classification"
