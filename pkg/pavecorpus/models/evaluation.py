from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from pavecorpus.models.annotation import BoxAbs

JUDGE_DIMENSIONS = (
    "factual_accuracy",
    "logical_coherence",
    "technical_terminology",
    "evidence_grounding",
    "completeness",
)
JUDGE_PASS_SCORE = 7.0


@dataclass(frozen=True, slots=True)
class ValidationReport:
    record_id: str
    failures: Tuple[Tuple[str, str], ...] = field(default_factory=tuple)
    checks_run: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def codes(self) -> List[str]:
        return [code for code, _ in self.failures]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "record_id": self.record_id,
            "verdict": self.verdict,
            "failures": [{"code": c, "message": m} for c, m in self.failures],
            "checks_run": self.checks_run,
        }


@dataclass(frozen=True, slots=True)
class LabeledBox:
    box: BoxAbs
    label: Optional[str] = None


@dataclass(frozen=True, slots=True)
class ParsedPrediction:
    """Structured view extracted from a model's free-text output"""

    boxes: Tuple[LabeledBox, ...] = field(default_factory=tuple)
    fields: Dict[str, str] = field(default_factory=dict)
    pci: Optional[float] = None
    choice: Optional[str] = None
    answer: Optional[str] = None
    checklist: Tuple[Tuple[bool, str], ...] = field(default_factory=tuple)
    steps: int = 0
    conclusion: Optional[str] = None


@dataclass(frozen=True, slots=True)
class PredictionRecord:
    record_id: str
    raw_text: str
    parsed: Optional[ParsedPrediction] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"record_id": self.record_id, "raw_text": self.raw_text}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PredictionRecord':
        return cls(record_id=str(data["record_id"]), raw_text=str(data.get("raw_text", "")))


@dataclass(frozen=True, slots=True)
class MatchResult:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    matched_ious: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def n_match(self) -> int:
        return len(self.matched_ious)

    def __add__(self, other: 'MatchResult') -> 'MatchResult':
        return MatchResult(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            matched_ious=self.matched_ious + other.matched_ious,
        )


@dataclass(frozen=True, slots=True)
class DetectionScores:
    precision: float
    recall: float
    f1: float
    mean_iou: float


@dataclass(frozen=True, slots=True)
class JudgeResult:
    score: float
    dimension_scores: Dict[str, float]

    @property
    def passed(self) -> bool:
        return self.score >= JUDGE_PASS_SCORE


@dataclass(slots=True)
class MetricReport:
    """Grouped evaluation output: perception, understanding, explanatory"""

    perception: Dict[str, Any] = field(default_factory=dict)
    understanding: Dict[str, Any] = field(default_factory=dict)
    explanatory: Dict[str, Any] = field(default_factory=dict)
    parsing_rate: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parsing_rate": self.parsing_rate,
            "perception": self.perception,
            "understanding": self.understanding,
            "explanatory": self.explanatory,
            "metadata": self.metadata,
            "errors": self.errors,
        }
