"""Exception hierarchy for the corpus toolchain.

Value-shaped errors also derive from ValueError so callers that only know
the standard library can still catch them.
"""
from typing import Optional


class PaveCorpusError(Exception):
    """Root of every error raised by pavecorpus"""


# ---------------------------------------------------------------------------
# Vocabulary / core
# ---------------------------------------------------------------------------

class UnknownLabel(PaveCorpusError, ValueError):
    def __init__(self, source_label: str, source_dataset: str):
        self.source_label = source_label
        self.source_dataset = source_dataset
        super().__init__(f"Label '{source_label}' is not registered for dataset '{source_dataset}'")


class UnknownSeverity(PaveCorpusError, ValueError):
    def __init__(self, value: str):
        self.value = value
        super().__init__(f"Severity '{value}' is not one of Low/Medium/High")


# ---------------------------------------------------------------------------
# Ingest
# ---------------------------------------------------------------------------

class IngestError(PaveCorpusError, ValueError):
    """Parser failure with optional file/line context"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        where = ""
        if self.path:
            where = f"{self.path}"
            if self.line is not None:
                where += f":{self.line}"
            where += ": "
        return f"{where}{self.message}"


class MalformedLine(IngestError):
    pass


class ClassIndexOutOfRange(IngestError):
    pass


class CoordOutOfRange(IngestError):
    pass


class MalformedXml(IngestError):
    pass


class MissingDims(IngestError):
    pass


class InvertedBox(IngestError):
    pass


class MalformedJson(IngestError):
    pass


class DanglingImageId(IngestError):
    pass


class NegativeExtent(IngestError):
    pass


class UnknownColorFolder(IngestError):
    pass


class MissingColumn(IngestError):
    pass


class PciOutOfRange(IngestError):
    pass


class DuplicateImageId(IngestError):
    pass


# ---------------------------------------------------------------------------
# Harmonize
# ---------------------------------------------------------------------------

class GeometryError(PaveCorpusError, ValueError):
    pass


class DegenerateBox(GeometryError):
    pass


class BoxOutsideImage(GeometryError):
    pass


class EmptyAnnotation(GeometryError):
    pass


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------

class GenerationError(PaveCorpusError):
    pass


class MissingTaskBlock(GenerationError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing task block"


class TemplateLoadError(GenerationError, ValueError):
    pass


class IncompatibleAnnotation(GenerationError, ValueError):
    pass


class TurnCountOutOfRange(GenerationError, ValueError):
    pass


class InfeasibleMix(GenerationError, ValueError):
    pass


class ProviderError(GenerationError):
    """Provider call failed after the configured retries"""

    def __init__(self, message: str, attempts: int = 0):
        self.attempts = attempts
        super().__init__(message)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

class EvaluationError(PaveCorpusError, ValueError):
    pass


class UnpairedRecord(EvaluationError):
    pass


class EmptyPredictionSet(EvaluationError):
    pass


class JudgeParseError(EvaluationError):
    pass


class EmptyCandidate(EvaluationError):
    pass


class CorpusTooSmall(EvaluationError):
    pass


class LengthMismatch(EvaluationError):
    pass


class EmptyInput(EvaluationError):
    pass


class UnknownRecordId(EvaluationError):
    pass


# ---------------------------------------------------------------------------
# Manifest / config
# ---------------------------------------------------------------------------

class ManifestError(PaveCorpusError, ValueError):
    pass


class ConfigError(PaveCorpusError):
    pass


# ---------------------------------------------------------------------------
# Review
# ---------------------------------------------------------------------------

class ReviewError(PaveCorpusError, ValueError):
    """Malformed or dangling human-review verdicts"""


class EmptyStratumWarning(UserWarning):
    """A review stratum holds fewer records than requested"""
