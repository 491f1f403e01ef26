"""Corpus statistics: source mix, distress frequencies, turn styles, answer lengths and formats"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable

from pavecorpus.evalkit.tokenize import word_count
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord
from pavecorpus.taxonomy import TaskCategory, get_task

logger = logging.getLogger("pavecorpus.report.stats")

MIN_TURNS = 1
MAX_TURNS = 8
OVERFLOW = "overflow"
WORD_BIN = 25
WORD_CAP = 300
SINGLE = "single"
MULTI = "multi"


def word_bins() -> list:
    edges = range(0, WORD_CAP, WORD_BIN)
    return [f"{lo}-{lo + WORD_BIN - 1}" for lo in edges] + [f"{WORD_CAP}+"]


def word_bin(words: int) -> str:
    if words >= WORD_CAP:
        return f"{WORD_CAP}+"
    lo = (words // WORD_BIN) * WORD_BIN
    return f"{lo}-{lo + WORD_BIN - 1}"


def turn_bins() -> list:
    return [str(n) for n in range(MIN_TURNS, MAX_TURNS + 1)] + [OVERFLOW]


def _fractions(counts: Counter, keys: Iterable[str]) -> Dict[str, float]:
    total = sum(counts.values())
    return {key: (counts[key] / total if total else 0.0) for key in keys}


@dataclass(slots=True)
class CorpusStats:
    """Tabulated corpus distributions; every histogram lists its full support"""

    total_records: int = 0
    total_answers: int = 0
    per_dataset_counts: Dict[str, int] = field(default_factory=dict)
    per_dataset_class_counts: Dict[str, Dict[str, int]] = field(default_factory=dict)
    global_distress_frequencies: Dict[str, float] = field(default_factory=dict)
    per_category_counts: Dict[str, int] = field(default_factory=dict)
    turn_style_fractions: Dict[str, float] = field(default_factory=dict)
    turn_count_histogram: Dict[str, int] = field(default_factory=dict)
    answer_word_count_histogram: Dict[str, int] = field(default_factory=dict)
    answer_format_fractions: Dict[str, float] = field(default_factory=dict)

    @property
    def turn_count_overflow(self) -> int:
        return self.turn_count_histogram.get(OVERFLOW, 0)

    @property
    def multi_turn_fraction(self) -> float:
        return self.turn_style_fractions.get(MULTI, 0.0)


def compute_stats(records: Iterable[InstructionRecord]) -> CorpusStats:
    """Single pass over the corpus; the result does not depend on record order"""
    datasets: Counter = Counter()
    classes: Dict[str, Counter] = {}
    distress: Counter = Counter()
    categories: Counter = Counter()
    styles: Counter = Counter()
    turns: Counter = Counter()
    words: Counter = Counter()
    formats: Counter = Counter()
    total = 0

    for record in records:
        total += 1
        datasets[record.source_dataset] += 1
        labels = (record.ground_truth or {}).get("labels") or []
        classes.setdefault(record.source_dataset, Counter()).update(labels)
        distress.update(labels)
        categories[get_task(record.task).category.value] += 1
        styles[MULTI if record.multi_turn else SINGLE] += 1
        exchanges = record.exchange_count
        turns[str(exchanges) if MIN_TURNS <= exchanges <= MAX_TURNS else OVERFLOW] += 1
        for text in record.assistant_texts():
            words[word_bin(word_count(text))] += 1
        formats[record.answer_format.value] += 1

    if turns[OVERFLOW]:
        logger.warning(f"{turns[OVERFLOW]} record(s) have a turn count outside {MIN_TURNS}..{MAX_TURNS}")

    return CorpusStats(
        total_records=total,
        total_answers=sum(words.values()),
        per_dataset_counts=dict(sorted(datasets.items())),
        per_dataset_class_counts={name: dict(sorted(c.items())) for name, c in sorted(classes.items()) if c},
        global_distress_frequencies=_fractions(distress, sorted(distress)),
        per_category_counts={c.value: categories[c.value] for c in TaskCategory},
        turn_style_fractions=_fractions(styles, (SINGLE, MULTI)),
        turn_count_histogram={key: turns[key] for key in turn_bins()},
        answer_word_count_histogram={key: words[key] for key in word_bins()},
        answer_format_fractions=_fractions(formats, [f.value for f in AnswerFormat]),
    )
