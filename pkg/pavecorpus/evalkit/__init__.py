from pavecorpus.evalkit.evaluator import (
    DEFAULT_METRICS,
    METRIC_FAMILIES,
    evaluate,
    parse_metric_selection,
    predictions_from_corpus,
    route,
    routes,
)
from pavecorpus.evalkit.generation import CiderResult, bleu4, cider, rouge_l
from pavecorpus.evalkit.grounding import DEFAULT_IOU_THRESHOLD, detection_scores, match_detections
from pavecorpus.evalkit.judge import judge_score, parse_judge_reply
from pavecorpus.evalkit.parsing import is_parsable, parse_prediction
from pavecorpus.evalkit.region import field_accuracy, levenshtein_similarity, parsing_rate
from pavecorpus.evalkit.regression import RegressionScores, regression_scores
from pavecorpus.evalkit.tokenize import TOKENIZER_VERSION, tokenize, word_count
from pavecorpus.evalkit.vqa import VqaScores, vqa_accuracy

__all__ = [
    "CiderResult",
    "DEFAULT_IOU_THRESHOLD",
    "DEFAULT_METRICS",
    "METRIC_FAMILIES",
    "RegressionScores",
    "TOKENIZER_VERSION",
    "VqaScores",
    "bleu4",
    "cider",
    "detection_scores",
    "evaluate",
    "field_accuracy",
    "is_parsable",
    "judge_score",
    "levenshtein_similarity",
    "match_detections",
    "parse_judge_reply",
    "parse_metric_selection",
    "parse_prediction",
    "parsing_rate",
    "predictions_from_corpus",
    "regression_scores",
    "rouge_l",
    "route",
    "routes",
    "tokenize",
    "vqa_accuracy",
    "word_count",
]
