"""Caption metrics over token lists: BLEU-4, ROUGE-L and CIDEr"""

import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from pavecorpus.errors import CorpusTooSmall, EmptyCandidate, LengthMismatch

BLEU_MAX_N = 4
ROUGE_BETA = 1.2
CIDER_MAX_N = 4

Ngram = Tuple[str, ...]


def precook(tokens: Sequence[str], n: int) -> Counter:
    """Counts of every n-gram of exactly length n"""
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# =========================================================
# BLEU
# =========================================================

def _closest_ref_length(candidate_len: int, references: Sequence[Sequence[str]]) -> int:
    return min((abs(len(r) - candidate_len), len(r)) for r in references)[1]


def bleu4(candidate: Sequence[str], references: Sequence[Sequence[str]]) -> float:
    """Geometric mean of clipped 1..4-gram precisions times the brevity penalty.

    Orders 2..4 use add-one smoothing so short answers without 4-grams stay defined.
    """
    if not candidate:
        raise EmptyCandidate("BLEU needs a non-empty candidate")
    if not references:
        raise EmptyCandidate("BLEU needs at least one reference")

    log_sum = 0.0
    for n in range(1, BLEU_MAX_N + 1):
        counts = precook(candidate, n)
        max_ref: Dict[Ngram, int] = {}
        for ref in references:
            for gram, count in precook(ref, n).items():
                max_ref[gram] = max(max_ref.get(gram, 0), count)
        clipped = sum(min(count, max_ref.get(gram, 0)) for gram, count in counts.items())
        total = max(0, len(candidate) - n + 1)
        if n == 1:
            if clipped == 0:
                return 0.0
            precision = clipped / total
        else:
            precision = (clipped + 1) / (total + 1)
        log_sum += math.log(precision)

    c = len(candidate)
    r = _closest_ref_length(c, references)
    brevity = 1.0 if c > r else math.exp(1 - r / c)
    return brevity * math.exp(log_sum / BLEU_MAX_N)


# =========================================================
# ROUGE-L
# =========================================================

def lcs_length(x: Sequence[str], y: Sequence[str]) -> int:
    if not x or not y:
        return 0
    table = np.zeros((len(x) + 1, len(y) + 1), dtype=int)
    for i in range(1, len(x) + 1):
        for j in range(1, len(y) + 1):
            if x[i - 1] == y[j - 1]:
                table[i, j] = table[i - 1, j - 1] + 1
            else:
                table[i, j] = max(table[i - 1, j], table[i, j - 1])
    return int(table[len(x), len(y)])


def rouge_l(candidate: Sequence[str], reference: Sequence[str], beta: float = ROUGE_BETA) -> float:
    lcs = lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    recall = lcs / len(reference)
    precision = lcs / len(candidate)
    return (1 + beta ** 2) * recall * precision / (recall + beta ** 2 * precision)


# =========================================================
# CIDEr
# =========================================================

@dataclass(frozen=True, slots=True)
class CiderResult:
    per_image: Tuple[float, ...]
    corpus: float


def _tfidf(counts: Counter, document_frequency: Counter, n_images: int) -> Dict[Ngram, float]:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {
        gram: (count / total) * math.log(n_images / max(1.0, document_frequency[gram]))
        for gram, count in counts.items()
    }


def _cosine(a: Dict[Ngram, float], b: Dict[Ngram, float]) -> float:
    norm_a = math.sqrt(sum(v * v for v in a.values()))
    norm_b = math.sqrt(sum(v * v for v in b.values()))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return sum(v * b.get(gram, 0.0) for gram, v in a.items()) / (norm_a * norm_b)


def cider(
    candidates: Sequence[Sequence[str]],
    reference_sets: Sequence[Sequence[Sequence[str]]],
    max_n: int = CIDER_MAX_N,
) -> CiderResult:
    """TF-IDF cosine consensus, averaged over references and n = 1..max_n (no x10 scaling).

    Document frequency counts the images whose reference set contains an n-gram.
    """
    if len(candidates) != len(reference_sets):
        raise LengthMismatch(f"{len(candidates)} candidates for {len(reference_sets)} reference sets")
    n_images = len(candidates)
    if n_images < 2:
        raise CorpusTooSmall(f"CIDEr needs at least 2 images, got {n_images}")

    scores = np.zeros((n_images, max_n), dtype=float)
    for n in range(1, max_n + 1):
        ref_counts = [[precook(ref, n) for ref in refs] for refs in reference_sets]
        document_frequency: Counter = Counter()
        for refs in ref_counts:
            document_frequency.update(set().union(*(set(c) for c in refs)) if refs else set())
        for i, (candidate, refs) in enumerate(zip(candidates, ref_counts)):
            if not refs:
                continue
            vec_c = _tfidf(precook(candidate, n), document_frequency, n_images)
            sims = [_cosine(vec_c, _tfidf(ref, document_frequency, n_images)) for ref in refs]
            scores[i, n - 1] = float(np.mean(sims))
    per_image = scores.mean(axis=1)
    return CiderResult(per_image=tuple(float(v) for v in per_image), corpus=float(per_image.mean()))
