"""Prediction grammar: boxes, key lines, PCI, choice letters, checklists and reasoning steps"""

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from pavecorpus.errors import GeometryError
from pavecorpus.models.annotation import BoxAbs
from pavecorpus.models.evaluation import LabeledBox, ParsedPrediction
from pavecorpus.models.instruction import AnswerFormat
from pavecorpus.taxonomy import REGION_TASKS

_NUMBER = r"(-?\d+(?:\.\d+)?)"
BOX_PATTERN = re.compile(r"\[\s*" + r"\s*,\s*".join([_NUMBER] * 4) + r"\s*\]")
FIELD_PATTERN = re.compile(r"^\s*(Distress|Severity|Repair)\s*:\s*(.+?)\s*$", re.MULTILINE | re.IGNORECASE)
PCI_PATTERN = re.compile(r"\bPCI\b[^\d\n]{0,40}?(\d+(?:\.\d+)?)")
CHOICE_PATTERN = re.compile(r"\bAnswer:\s*\(?([A-D])\)?(?=[\s.,;:]|$)")
ANSWER_PATTERN = re.compile(r"^\s*Answer:\s*(.+?)\s*$", re.MULTILINE)
CHECKLIST_PATTERN = re.compile(r"^\s*- \[( |x|X)\]\s*(.+?)\s*$", re.MULTILINE)
STEP_PATTERN = re.compile(r"^\s*Step \d+:", re.MULTILINE)
CONCLUSION_PATTERN = re.compile(r"^\s*Conclusion:\s*(.+?)\s*$", re.MULTILINE)

_LIST_MARKER = re.compile(r"^(?:\d+\.|[-*])\s*")
_LABEL_TAIL = re.compile(r"(?:\s+at|:|,)\s*$", re.IGNORECASE)


@dataclass(frozen=True, slots=True)
class BoxLiteral:
    """A bracketed four-number list as written in text"""

    coords: Tuple[float, float, float, float]
    integral: bool
    start: int
    end: int

    @property
    def inverted(self) -> bool:
        x1, y1, x2, y2 = self.coords
        return x1 > x2 or y1 > y2


def find_box_literals(text: str) -> List[BoxLiteral]:
    found = []
    for match in BOX_PATTERN.finditer(text):
        raw = match.groups()
        found.append(BoxLiteral(
            coords=tuple(float(v) for v in raw),
            integral=all("." not in v for v in raw),
            start=match.start(),
            end=match.end(),
        ))
    return found


def _label_before(text: str, literal: BoxLiteral, previous_end: int) -> Optional[str]:
    line_start = text.rfind("\n", 0, literal.start) + 1
    segment = text[max(line_start, previous_end):literal.start].strip()
    segment = _LIST_MARKER.sub("", segment)
    segment = _LABEL_TAIL.sub("", segment).strip().lower()
    return segment or None


def parse_boxes(text: str) -> Tuple[LabeledBox, ...]:
    boxes = []
    previous_end = 0
    for literal in find_box_literals(text):
        try:
            box = BoxAbs(*literal.coords)
        except GeometryError:
            previous_end = literal.end
            continue
        boxes.append(LabeledBox(box=box, label=_label_before(text, literal, previous_end)))
        previous_end = literal.end
    return tuple(boxes)


def parse_fields(text: str) -> Dict[str, str]:
    fields: Dict[str, str] = {}
    for key, value in FIELD_PATTERN.findall(text):
        fields.setdefault(key.lower(), value)
    return fields


def parse_pci(text: str) -> Optional[float]:
    match = PCI_PATTERN.search(text)
    return float(match.group(1)) if match else None


def parse_prediction(text: str) -> ParsedPrediction:
    choice = CHOICE_PATTERN.search(text)
    answer = ANSWER_PATTERN.search(text)
    conclusion = CONCLUSION_PATTERN.search(text)
    return ParsedPrediction(
        boxes=parse_boxes(text),
        fields=parse_fields(text),
        pci=parse_pci(text),
        choice=choice.group(1) if choice else None,
        answer=answer.group(1) if answer else None,
        checklist=tuple((mark.lower() == "x", item) for mark, item in CHECKLIST_PATTERN.findall(text)),
        steps=len(STEP_PATTERN.findall(text)),
        conclusion=conclusion.group(1) if conclusion else None,
    )


def missing_fields(task: str, answer_format: AnswerFormat, parsed: ParsedPrediction, raw_text: str) -> List[str]:
    """Required fields the parsed output lacks for its task and answer format"""
    missing: List[str] = []
    if task in REGION_TASKS:
        missing.extend(key for key in ("distress", "repair") if key not in parsed.fields)
    if answer_format is AnswerFormat.COORDINATES and not parsed.boxes:
        missing.append("boxes")
    elif answer_format is AnswerFormat.NUMERIC and parsed.pci is None:
        missing.append("pci")
    elif answer_format is AnswerFormat.MULTIPLE_CHOICE and parsed.choice is None:
        missing.append("choice")
    elif answer_format is AnswerFormat.SHORT_ANSWER and parsed.answer is None:
        missing.append("answer")
    elif answer_format is AnswerFormat.CHECKLIST and not parsed.checklist:
        missing.append("checklist")
    elif answer_format is AnswerFormat.CHAIN_OF_THOUGHT:
        if parsed.steps == 0:
            missing.append("steps")
        if parsed.conclusion is None:
            missing.append("conclusion")
    elif answer_format is AnswerFormat.DESCRIPTIVE and not raw_text.strip():
        missing.append("text")
    return missing


def is_parsable(task: str, answer_format: AnswerFormat, raw_text: str) -> bool:
    return not missing_fields(task, answer_format, parse_prediction(raw_text), raw_text)
