"""Region-level understanding: fuzzy field matching and parsing rate"""

import re
from typing import Mapping, Optional, Sequence

import Levenshtein

from pavecorpus.errors import EmptyPredictionSet, UnpairedRecord
from pavecorpus.evalkit.parsing import is_parsable
from pavecorpus.models.instruction import AnswerFormat

FIELD_MATCH_THRESHOLD = 0.7
REGION_FIELDS = ("distress", "severity", "repair")

_WHITESPACE = re.compile(r"\s+")


def edit_distance(a: str, b: str) -> int:
    return Levenshtein.distance(a, b)


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / max length on the strings as given; two empty strings give 1"""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return (longest - edit_distance(a, b)) / longest


def normalize_exact(value: str) -> str:
    return value.strip().lower()


def normalize_fuzzy(value: str) -> str:
    """Lowercase with all whitespace removed"""
    return _WHITESPACE.sub("", value.lower())


def field_match(predicted: Optional[str], expected: Optional[str], field: str) -> bool:
    if predicted is None or expected is None:
        return False
    if field == "severity":
        return normalize_exact(predicted) == normalize_exact(expected)
    return levenshtein_similarity(normalize_fuzzy(predicted), normalize_fuzzy(expected)) > FIELD_MATCH_THRESHOLD


def field_accuracy(
    preds: Mapping[str, Mapping[str, str]],
    gts: Mapping[str, Mapping[str, Optional[str]]],
    field: str,
) -> Optional[float]:
    """Share of records whose predicted `field` matches ground truth.

    Both sides are keyed by record id. Records whose ground truth has no value
    for the field are not scored; None when nothing is scored.
    """
    field = field.lower()
    if field not in REGION_FIELDS:
        raise ValueError(f"unknown region field '{field}'")
    missing = sorted(set(gts) - set(preds))
    extra = sorted(set(preds) - set(gts))
    if missing or extra:
        raise UnpairedRecord(f"unpaired record ids: {(missing + extra)[:5]}")
    scored = [rid for rid in gts if gts[rid].get(field) is not None]
    if not scored:
        return None
    hits = sum(1 for rid in scored if field_match(preds[rid].get(field), gts[rid][field], field))
    return hits / len(scored)


def parsing_rate(preds: Sequence[tuple]) -> float:
    """Share of (task, answer_format, raw_text) triples that carry every required field"""
    if not preds:
        raise EmptyPredictionSet("parsing rate needs at least one prediction")
    parsed = sum(1 for task, fmt, raw in preds if is_parsable(task, AnswerFormat(fmt), raw))
    return parsed / len(preds)
