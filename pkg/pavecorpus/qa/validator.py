"""Structural and domain-consistency checks for instruction records"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional

from pavecorpus.evalkit.parsing import (
    CHOICE_PATTERN,
    FIELD_PATTERN,
    PCI_PATTERN,
    BoxLiteral,
    find_box_literals,
    missing_fields,
    parse_prediction,
)
from pavecorpus.harmonize.geometry import iou
from pavecorpus.models.annotation import BoxAbs, ImageDims, UnifiedAnnotation
from pavecorpus.models.evaluation import ValidationReport
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord, Role
from pavecorpus.qa import codes
from pavecorpus.taxonomy import MULTI_IMAGE_TASK, get_task
from pavecorpus.vocabulary import SEVERITY_VOCABULARY, default_alias_table

logger = logging.getLogger("pavecorpus.qa.validator")

SOURCE_MATCH_IOU = 0.99
MAX_EXCHANGES = 8
CHOICE_KEYS = ("A", "B", "C", "D")

SEVERITY_PHRASE = re.compile(
    r"\b(low|medium|high|moderate|severe|minor|major|extreme|critical)[- ]severity\b", re.IGNORECASE
)

_FORMAT_CODES = {
    "pci": codes.NUMERIC_FORMAT,
    "checklist": codes.CHECKLIST_FORMAT,
    "choice": codes.CHOICE_KEY_INVALID,
}


class _Findings:
    """Ordered failures, one entry per code"""

    def __init__(self):
        self.items: Dict[str, str] = {}
        self.checks = 0

    def add(self, code: str, message: str) -> None:
        self.items.setdefault(code, message)


def _dims_for(record: InstructionRecord, annotation: Optional[UnifiedAnnotation]) -> Optional[ImageDims]:
    if annotation is not None:
        return annotation.dims
    raw = (record.ground_truth or {}).get("image_dims")
    try:
        return ImageDims.from_list(raw) if raw else None
    except (TypeError, ValueError, IndexError):
        return None


def _check_required(record: InstructionRecord, found: _Findings) -> None:
    if not record.record_id or not record.image_refs or not record.turns:
        found.add(codes.MISSING_REQUIRED_FIELD, "record_id, image_refs and turns are required")
        return
    try:
        get_task(record.task)
        if record.multi_turn:
            get_task(record.closing_task)
    except KeyError as e:
        found.add(codes.MISSING_REQUIRED_FIELD, str(e))
        return
    if record.ground_truth is None:
        found.add(codes.MISSING_REQUIRED_FIELD, "ground_truth is missing")
    answer = record.final_answer
    for name in missing_fields(record.closing_task, record.answer_format, parse_prediction(answer), answer):
        found.add(_FORMAT_CODES.get(name, codes.MISSING_REQUIRED_FIELD), f"final answer lacks '{name}'")


def _check_turns(record: InstructionRecord, found: _Findings) -> None:
    turns = record.turns
    expected = [Role.USER, Role.ASSISTANT] * (len(turns) // 2)
    if len(turns) % 2 or [t.role for t in turns] != expected:
        found.add(codes.TURN_STRUCTURE, "turns must alternate user/assistant starting with the user")
    exchanges = record.exchange_count
    if record.multi_turn and not 2 <= exchanges <= MAX_EXCHANGES:
        found.add(codes.TURN_STRUCTURE, f"multi-turn record has {exchanges} exchanges")
    if not record.multi_turn and exchanges != 1:
        found.add(codes.TURN_STRUCTURE, f"single-turn record has {exchanges} exchanges")
    if any(not t.text.strip() for t in turns):
        found.add(codes.EMPTY_TURN, "a turn has empty text")


def _check_pci(record: InstructionRecord, found: _Findings) -> None:
    for text in record.assistant_texts():
        for match in PCI_PATTERN.finditer(text):
            value = float(match.group(1))
            if not 0.0 <= value <= 100.0:
                found.add(codes.PCI_OUT_OF_RANGE, f"PCI {match.group(1)} outside [0, 100]")
    pci = (record.ground_truth or {}).get("pci")
    if pci is not None and not 0.0 <= float(pci) <= 100.0:
        found.add(codes.PCI_OUT_OF_RANGE, f"ground-truth PCI {pci} outside [0, 100]")


def _in_source(literal: BoxLiteral, annotation: UnifiedAnnotation) -> bool:
    quoted = BoxAbs(*literal.coords)
    coords = [int(v) for v in literal.coords]
    for inst in annotation.instances:
        rendered = inst.box.rendered(annotation.dims)
        if rendered == coords or iou(quoted, BoxAbs(*map(float, rendered))) >= SOURCE_MATCH_IOU:
            return True
    return False


def _check_boxes(
    record: InstructionRecord,
    annotation: Optional[UnifiedAnnotation],
    dims: Optional[ImageDims],
    found: _Findings,
) -> None:
    for text in record.assistant_texts():
        for literal in find_box_literals(text):
            shown = "[" + ", ".join(f"{v:g}" for v in literal.coords) + "]"
            if not literal.integral:
                found.add(codes.COORDINATE_FORMAT, f"box {shown} is not four integers")
                continue
            if literal.inverted:
                found.add(codes.BOX_INVERTED, f"box {shown} is inverted")
                continue
            box = BoxAbs(*literal.coords)
            if dims is not None and not box.within(dims):
                found.add(codes.BOX_OUT_OF_IMAGE, f"box {shown} exceeds {dims.width}x{dims.height}")
                continue
            if annotation is not None and not _in_source(literal, annotation):
                found.add(codes.BOX_NOT_IN_SOURCE, f"box {shown} matches no source box")


def _check_vocabulary(record: InstructionRecord, found: _Findings) -> None:
    table = default_alias_table()
    for text in record.assistant_texts():
        for key, value in FIELD_PATTERN.findall(text):
            key = key.lower()
            if key == "severity" and value.strip().lower() not in SEVERITY_VOCABULARY:
                found.add(codes.SEVERITY_VOCABULARY, f"severity '{value}' is not Low/Medium/High")
            if key == "distress" and value.strip().lower() != "none" and not table.is_canonical(value):
                found.add(codes.DISTRESS_VOCABULARY, f"distress '{value}' is not a canonical label")
        for match in SEVERITY_PHRASE.finditer(text):
            if match.group(1).lower() not in SEVERITY_VOCABULARY:
                found.add(codes.SEVERITY_VOCABULARY, f"'{match.group(0)}' uses an unregistered severity")
    severity = (record.ground_truth or {}).get("severity")
    if severity is not None and str(severity).lower() not in SEVERITY_VOCABULARY:
        found.add(codes.SEVERITY_VOCABULARY, f"ground-truth severity '{severity}' is not Low/Medium/High")


def _check_choice(record: InstructionRecord, found: _Findings) -> None:
    if record.answer_format is not AnswerFormat.MULTIPLE_CHOICE:
        return
    match = CHOICE_PATTERN.search(record.final_answer)
    if match is None:
        return  # reported as a missing field
    letter = match.group(1)
    if f"({letter})" not in record.final_question:
        found.add(codes.CHOICE_KEY_INVALID, f"answer ({letter}) is not an offered option")
    truth = (record.ground_truth or {}).get("choice")
    if truth is not None and truth not in CHOICE_KEYS:
        found.add(codes.CHOICE_KEY_INVALID, f"ground-truth choice '{truth}' is not A-D")


def _check_image_refs(record: InstructionRecord, found: _Findings) -> None:
    count = len(record.image_refs)
    if record.task == MULTI_IMAGE_TASK:
        if not 2 <= count <= 3:
            found.add(codes.IMAGE_REF_COUNT, f"multi-image record has {count} image references")
    elif count != 1:
        found.add(codes.IMAGE_REF_COUNT, f"record has {count} image references, expected 1")


def validate_record(record: InstructionRecord, annotation: Optional[UnifiedAnnotation] = None) -> ValidationReport:
    """Run every check; failures are data, never exceptions"""
    found = _Findings()
    checks: List[Callable[[], None]] = [
        lambda: _check_required(record, found),
        lambda: _check_turns(record, found),
        lambda: _check_pci(record, found),
        lambda: _check_boxes(record, annotation, _dims_for(record, annotation), found),
        lambda: _check_vocabulary(record, found),
        lambda: _check_choice(record, found),
        lambda: _check_image_refs(record, found),
    ]
    for check in checks:
        check()
    return ValidationReport(
        record_id=record.record_id,
        failures=tuple(found.items.items()),
        checks_run=len(checks),
    )


# =========================================================
# CORPUS
# =========================================================

@dataclass(slots=True)
class CorpusValidation:
    total: int = 0
    passed: int = 0
    failure_histogram: Dict[str, int] = field(default_factory=dict)
    failed: List[ValidationReport] = field(default_factory=list)

    @property
    def pass_rate(self) -> Optional[float]:
        return self.passed / self.total if self.total else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "passed": self.passed,
            "failed": self.total - self.passed,
            "pass_rate": self.pass_rate,
            "failure_histogram": dict(sorted(self.failure_histogram.items())),
            "failures": [r.to_dict() for r in sorted(self.failed, key=lambda r: r.record_id)],
        }


def validate_corpus(
    records: Iterable[InstructionRecord],
    annotation_for: Optional[Callable[[str], Optional[UnifiedAnnotation]]] = None,
) -> CorpusValidation:
    """Aggregate per-record reports; `annotation_for` maps an image ref to its source annotation"""
    histogram: Counter = Counter()
    summary = CorpusValidation()
    for record in records:
        annotation = annotation_for(record.image_refs[0]) if annotation_for and record.image_refs else None
        report = validate_record(record, annotation)
        summary.total += 1
        if report.passed:
            summary.passed += 1
        else:
            histogram.update(report.codes)
            summary.failed.append(report)
    summary.failure_histogram = dict(histogram)
    if summary.total:
        logger.info(f"Validated {summary.total} records, pass rate {summary.pass_rate:.3f}")
    else:
        logger.info("Validated an empty corpus; pass rate not applicable")
    return summary
