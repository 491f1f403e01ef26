"""Rubric-based model-as-judge scoring for free-text answers"""

import json
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from pavecorpus.errors import JudgeParseError
from pavecorpus.genkit.provider import PURPOSE_JUDGE, Provider, ProviderRequest, complete_with_retries
from pavecorpus.models.evaluation import JUDGE_DIMENSIONS, JUDGE_PASS_SCORE, JudgeResult

logger = logging.getLogger("pavecorpus.evalkit.judge")

JUDGE_RUBRIC_VERSION = "1"
JUDGE_PARSE_RETRIES = 2
SCORE_RANGE = (1.0, 10.0)

JUDGE_RUBRIC = f"""You are a senior pavement engineer grading an inspection answer.
Compare the candidate answer with the reference answer and score it from 1 to 10 on each dimension:
- factual_accuracy: distresses, severities, locations and scores agree with the reference
- logical_coherence: the reasoning follows from the observations without contradictions
- technical_terminology: ASTM D6433 distress names and severity levels are used correctly
- evidence_grounding: claims are tied to visible evidence or stated data
- completeness: every part of the question is answered

Also give an overall score from 1 to 10. An answer scoring {JUDGE_PASS_SCORE:g} or more is acceptable.
Return ONLY valid JSON with keys: score, {", ".join(JUDGE_DIMENSIONS)}.
"""


def build_judge_request(question: str, prediction: str, ground_truth: str) -> ProviderRequest:
    user_prompt = json.dumps(
        {"question": question, "reference_answer": ground_truth, "candidate_answer": prediction},
        ensure_ascii=False,
    )
    return ProviderRequest(
        system_prompt=JUDGE_RUBRIC,
        user_prompt=user_prompt,
        temperature=0.0,
        max_tokens=256,
        purpose=PURPOSE_JUDGE,
    )


def _try_parse_json(text: str) -> Optional[Dict[str, Any]]:
    text = (text or "").strip()
    if not text:
        return None
    try:
        obj = json.loads(text)
        if isinstance(obj, dict):
            return obj
    except json.JSONDecodeError:
        pass
    # models often wrap the object in prose or code fences
    start, end = text.find("{"), text.rfind("}")
    if start != -1 and end > start:
        try:
            obj = json.loads(text[start:end + 1])
            if isinstance(obj, dict):
                return obj
        except json.JSONDecodeError:
            return None
    return None


def _score(data: Dict[str, Any], key: str) -> float:
    try:
        value = float(data[key])
    except (KeyError, TypeError, ValueError):
        raise JudgeParseError(f"judge reply lacks a numeric '{key}'") from None
    low, high = SCORE_RANGE
    if not low <= value <= high:
        raise JudgeParseError(f"judge '{key}' score {value} outside [{low:g}, {high:g}]")
    return value


def parse_judge_reply(text: str) -> JudgeResult:
    data = _try_parse_json(text)
    if data is None:
        raise JudgeParseError(f"judge reply is not JSON: {text[:120]!r}")
    return JudgeResult(
        score=_score(data, "score"),
        dimension_scores={dim: _score(data, dim) for dim in JUDGE_DIMENSIONS},
    )


async def judge_score(question: str, prediction: str, ground_truth: str, provider: Provider) -> JudgeResult:
    """Score one answer; an unparseable reply is re-requested up to two more times"""
    request = build_judge_request(question, prediction, ground_truth)
    last_error: Optional[JudgeParseError] = None
    for attempt in range(1 + JUDGE_PARSE_RETRIES):
        reply = await complete_with_retries(provider, request)
        try:
            return parse_judge_reply(reply.text)
        except JudgeParseError as e:
            last_error = e
            logger.warning(f"Judge reply unparseable (attempt {attempt + 1}): {e}")
    raise JudgeParseError(f"judge reply unparseable after {1 + JUDGE_PARSE_RETRIES} attempts: {last_error}")


def summarize_judgements(results: Sequence[JudgeResult]) -> Dict[str, Any]:
    """Mean score, pass rate and mean per-dimension scores"""
    if not results:
        return {"judge_mean": None, "judge_pass_rate": None, "judge_dimensions": {}, "judge_n": 0}
    return {
        "judge_mean": float(np.mean([r.score for r in results])),
        "judge_pass_rate": sum(1 for r in results if r.passed) / len(results),
        "judge_dimensions": {
            dim: float(np.mean([r.dimension_scores[dim] for r in results])) for dim in JUDGE_DIMENSIONS
        },
        "judge_n": len(results),
    }
