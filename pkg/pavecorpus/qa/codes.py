"""Failure-code registry for record validation"""

from typing import Dict

MISSING_REQUIRED_FIELD = "MissingRequiredField"
TURN_STRUCTURE = "TurnStructure"
EMPTY_TURN = "EmptyTurn"
PCI_OUT_OF_RANGE = "PciOutOfRange"
COORDINATE_FORMAT = "CoordinateFormat"
BOX_INVERTED = "BoxInverted"
BOX_OUT_OF_IMAGE = "BoxOutOfImage"
BOX_NOT_IN_SOURCE = "BoxNotInSource"
SEVERITY_VOCABULARY = "SeverityVocabulary"
DISTRESS_VOCABULARY = "DistressVocabulary"
CHOICE_KEY_INVALID = "ChoiceKeyInvalid"
IMAGE_REF_COUNT = "ImageRefCount"
CHECKLIST_FORMAT = "ChecklistFormat"
NUMERIC_FORMAT = "NumericFormat"

FAILURE_CODES: Dict[str, str] = {
    MISSING_REQUIRED_FIELD: "A field the task requires is absent from the record or its final answer",
    TURN_STRUCTURE: "Turns do not alternate user/assistant, or the exchange count disagrees with the turn style",
    EMPTY_TURN: "A turn has no text",
    PCI_OUT_OF_RANGE: "A PCI value in an answer or the ground truth lies outside 0..100",
    COORDINATE_FORMAT: "A quoted box is not a list of four integers",
    BOX_INVERTED: "A quoted box has x1 > x2 or y1 > y2",
    BOX_OUT_OF_IMAGE: "A quoted box extends beyond the image dimensions",
    BOX_NOT_IN_SOURCE: "A quoted box matches no source annotation box (IoU below 0.99)",
    SEVERITY_VOCABULARY: "A severity outside Low/Medium/High is used",
    DISTRESS_VOCABULARY: "A Distress field names a label outside the canonical vocabulary",
    CHOICE_KEY_INVALID: "A multiple-choice answer letter is missing or not one of the offered options",
    IMAGE_REF_COUNT: "The number of image references does not fit the task",
    CHECKLIST_FORMAT: "A checklist answer has no '- [x]' / '- [ ]' items",
    NUMERIC_FORMAT: "A numeric answer carries no parsable PCI value",
}


def describe(code: str) -> str:
    return FAILURE_CODES[code]
