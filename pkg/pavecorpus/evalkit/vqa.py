"""Short-answer accuracy with exact and relaxed matching"""

import re
import string
from dataclasses import dataclass
from typing import Mapping

from pavecorpus.errors import EmptyPredictionSet, UnpairedRecord
from pavecorpus.evalkit.region import levenshtein_similarity

RELAXED_THRESHOLD = 0.8

_ARTICLES = re.compile(r"\b(a|an|the)\b")
_PUNCTUATION = str.maketrans({c: " " for c in string.punctuation})


@dataclass(frozen=True, slots=True)
class VqaScores:
    exact: float
    relaxed: float


def normalize_answer(text: str) -> str:
    """Lowercase, punctuation to spaces, articles removed, whitespace collapsed"""
    text = text.lower().translate(_PUNCTUATION)
    text = _ARTICLES.sub(" ", text)
    return " ".join(text.split())


def exact_match(prediction: str, truth: str) -> bool:
    return normalize_answer(prediction) == normalize_answer(truth)


def relaxed_match(prediction: str, truth: str) -> bool:
    p, t = normalize_answer(prediction), normalize_answer(truth)
    if p == t:
        return True
    if p and t and (p in t or t in p):
        return True
    return levenshtein_similarity(p, t) > RELAXED_THRESHOLD


def vqa_accuracy(preds: Mapping[str, str], gts: Mapping[str, str]) -> VqaScores:
    """Exact and relaxed accuracy over answers keyed by record id"""
    if set(preds) != set(gts):
        unpaired = sorted(set(preds) ^ set(gts))
        raise UnpairedRecord(f"unpaired record ids: {unpaired[:5]}")
    if not gts:
        raise EmptyPredictionSet("VQA accuracy needs at least one answer")
    exact = sum(1 for rid in gts if exact_match(preds[rid], gts[rid]))
    relaxed = sum(1 for rid in gts if relaxed_match(preds[rid], gts[rid]))
    return VqaScores(exact=exact / len(gts), relaxed=relaxed / len(gts))
