from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pavecorpus import settings


class LengthVariant(str, Enum):
    SHORT = "short"
    MEDIUM = "medium"
    LONG = "long"


class AnswerFormat(str, Enum):
    COORDINATES = "coordinates"
    DESCRIPTIVE = "descriptive"
    SHORT_ANSWER = "short_answer"
    MULTIPLE_CHOICE = "multiple_choice"
    CHAIN_OF_THOUGHT = "chain_of_thought"
    NUMERIC = "numeric"
    CHECKLIST = "checklist"


class Role(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"


@dataclass(frozen=True, slots=True)
class Turn:
    role: Role
    text: str

    def to_dict(self) -> Dict[str, Any]:
        return {"role": self.role.value, "text": self.text}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Turn':
        return cls(role=Role(data["role"]), text=data["text"])


@dataclass(frozen=True, slots=True)
class InstructionRecord:
    """One instruction-response sample (single- or multi-turn)"""

    record_id: str
    image_refs: Tuple[str, ...]
    task: str
    length: LengthVariant
    turns: Tuple[Turn, ...]
    answer_format: AnswerFormat
    source_dataset: str
    ground_truth: Optional[Dict[str, Any]] = None
    multi_turn: bool = False
    review: Optional[Dict[str, Any]] = None
    schema_version: int = field(default=settings.SCHEMA_VERSION)

    @property
    def final_answer(self) -> str:
        for turn in reversed(self.turns):
            if turn.role is Role.ASSISTANT:
                return turn.text
        return ""

    @property
    def final_question(self) -> str:
        for turn in reversed(self.turns):
            if turn.role is Role.USER:
                return turn.text
        return ""

    @property
    def exchange_count(self) -> int:
        return len(self.turns) // 2

    @property
    def closing_task(self) -> str:
        """Task whose answer closes the conversation"""
        if self.multi_turn and self.ground_truth and self.ground_truth.get("closing_task"):
            return self.ground_truth["closing_task"]
        return self.task

    def assistant_texts(self) -> List[str]:
        return [t.text for t in self.turns if t.role is Role.ASSISTANT]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "record_id": self.record_id,
            "image_refs": list(self.image_refs),
            "task": self.task,
            "length": self.length.value,
            "multi_turn": self.multi_turn,
            "answer_format": self.answer_format.value,
            "source_dataset": self.source_dataset,
            "turns": [t.to_dict() for t in self.turns],
            "ground_truth": self.ground_truth,
            "review": self.review,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'InstructionRecord':
        return cls(
            record_id=data["record_id"],
            image_refs=tuple(data["image_refs"]),
            task=data["task"],
            length=LengthVariant(data["length"]),
            turns=tuple(Turn.from_dict(t) for t in data["turns"]),
            answer_format=AnswerFormat(data["answer_format"]),
            source_dataset=data["source_dataset"],
            ground_truth=data.get("ground_truth"),
            multi_turn=bool(data.get("multi_turn", False)),
            review=data.get("review"),
            schema_version=int(data.get("schema_version", settings.SCHEMA_VERSION)),
        )
