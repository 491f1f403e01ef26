"""Spatial grounding metrics: greedy one-to-one box matching, P/R/F1 and IoU summaries"""

from typing import Sequence

import numpy as np

from pavecorpus.harmonize.geometry import iou
from pavecorpus.models.annotation import BoxAbs
from pavecorpus.models.evaluation import DetectionScores, MatchResult

DEFAULT_IOU_THRESHOLD = 0.5


def iou_matrix(preds: Sequence[BoxAbs], gts: Sequence[BoxAbs]) -> np.ndarray:
    matrix = np.zeros((len(preds), len(gts)), dtype=float)
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            matrix[i, j] = iou(p, g)
    return matrix


def match_detections(preds: Sequence[BoxAbs], gts: Sequence[BoxAbs], tau: float = DEFAULT_IOU_THRESHOLD) -> MatchResult:
    """Greedy matching: predictions in descending best-IoU order each claim their best unmatched ground truth.

    Ties keep the earlier prediction / ground-truth index. A claim counts only
    when its IoU is at least `tau`.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    if not preds or not gts:
        return MatchResult(tp=0, fp=len(preds), fn=len(gts))

    matrix = iou_matrix(preds, gts)
    order = np.argsort(-matrix.max(axis=1), kind="stable")
    unmatched = np.ones(len(gts), dtype=bool)
    ious = []
    for p in order:
        candidates = np.where(unmatched, matrix[p], -1.0)
        g = int(np.argmax(candidates))
        if unmatched[g] and candidates[g] >= tau:
            unmatched[g] = False
            ious.append(float(candidates[g]))
    tp = len(ious)
    return MatchResult(tp=tp, fp=len(preds) - tp, fn=len(gts) - tp, matched_ious=tuple(ious))


def detection_scores(match: MatchResult) -> DetectionScores:
    """Precision, recall, F1 and mean matched IoU; zero denominators give 0"""
    precision = match.tp / (match.tp + match.fp) if match.tp + match.fp else 0.0
    recall = match.tp / (match.tp + match.fn) if match.tp + match.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    mean_iou = float(np.mean(match.matched_ious)) if match.matched_ious else 0.0
    return DetectionScores(precision=precision, recall=recall, f1=f1, mean_iou=mean_iou)


def localization_ious(preds: Sequence[BoxAbs], gts: Sequence[BoxAbs]) -> list:
    """Best IoU any prediction reaches for each ground-truth box, regardless of the threshold"""
    if not gts:
        return []
    if not preds:
        return [0.0] * len(gts)
    return [float(v) for v in iou_matrix(preds, gts).max(axis=0)]


def exact_localization(match: MatchResult) -> bool:
    return match.fn == 0 and match.fp == 0
