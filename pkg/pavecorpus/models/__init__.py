from pavecorpus.models.annotation import (
    BoxAbs,
    BoxNorm,
    ConditionClass,
    ConditionLabel,
    DistressClass,
    ImageDims,
    Instance,
    PciScore,
    Severity,
    SourceColor,
    UnifiedAnnotation,
)
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord, LengthVariant, Role, Turn
from pavecorpus.models.raw import CocoInstances, ColorClass, PciRow, RawRecord, VocBoxes, YoloBoxes
from pavecorpus.models.evaluation import (
    DetectionScores,
    JudgeResult,
    LabeledBox,
    MatchResult,
    MetricReport,
    ParsedPrediction,
    PredictionRecord,
    ValidationReport,
)

__all__ = [
    "AnswerFormat",
    "BoxAbs",
    "BoxNorm",
    "CocoInstances",
    "ColorClass",
    "ConditionClass",
    "ConditionLabel",
    "DetectionScores",
    "DistressClass",
    "ImageDims",
    "Instance",
    "InstructionRecord",
    "JudgeResult",
    "LabeledBox",
    "LengthVariant",
    "MatchResult",
    "MetricReport",
    "ParsedPrediction",
    "PciRow",
    "PciScore",
    "PredictionRecord",
    "RawRecord",
    "Role",
    "Severity",
    "SourceColor",
    "Turn",
    "UnifiedAnnotation",
    "ValidationReport",
    "VocBoxes",
    "YoloBoxes",
]
