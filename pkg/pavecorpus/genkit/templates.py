"""Instruction template families and slot filling"""

import hashlib
import json
import logging
import string
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from pavecorpus import settings
from pavecorpus.errors import MissingTaskBlock, TemplateLoadError
from pavecorpus.models.instruction import LengthVariant
from pavecorpus.taxonomy import MULTI_TURN_TASK, taxonomy

logger = logging.getLogger("pavecorpus.genkit.templates")

TEMPLATES_PATH = settings.DATA_DIR / "templates.json"

FAMILIES = ("captioning", "chain_of_thought", "grounding", "pci_specific", "corrective", "multi_turn")
SLOTS = frozenset({
    "class", "box", "severity", "pci", "count",
    "boxes", "condition", "options", "answer", "treatment", "image_count",
    "expression", "claim",
})
STAGES = ("observation", "priority", "severity", "treatment", "timeline", "budget", "safety")

LENGTH_SUFFIX = {
    LengthVariant.SHORT: " Answer briefly.",
    LengthVariant.MEDIUM: "",
    LengthVariant.LONG: " Explain your answer in detail.",
}

_ALL_LENGTHS = frozenset(LengthVariant)


def template_slots(text: str) -> List[str]:
    return [name for _, name, _, _ in string.Formatter().parse(text) if name is not None]


@dataclass(frozen=True, slots=True)
class InstructionTemplate:
    family: str
    text: str
    tasks: FrozenSet[str] = field(default_factory=frozenset)
    lengths: FrozenSet[LengthVariant] = _ALL_LENGTHS
    stage: Optional[str] = None

    @property
    def slots(self) -> List[str]:
        return template_slots(self.text)

    def fill(self, values: Mapping[str, str]) -> str:
        missing = [s for s in self.slots if s not in values]
        if missing:
            raise TemplateLoadError(f"template '{self.text}' needs slots {missing}")
        return self.text.format(**{s: values[s] for s in self.slots})


@dataclass(frozen=True, slots=True)
class TemplateFamily:
    name: str
    templates: Tuple[InstructionTemplate, ...]


def _stable_index(key: str, size: int) -> int:
    digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
    return int(digest[:8], 16) % size


class TemplateRegistry:
    """Six template families; every task and consultation stage has at least one template"""

    def __init__(self, version: str, families: Dict[str, TemplateFamily]):
        self.version = version
        self.families = families
        self._by_task: Dict[str, List[InstructionTemplate]] = {}
        self._by_stage: Dict[str, List[InstructionTemplate]] = {}
        for family in families.values():
            for template in family.templates:
                if template.stage:
                    self._by_stage.setdefault(template.stage, []).append(template)
                for task in template.tasks:
                    self._by_task.setdefault(task, []).append(template)

    @classmethod
    def load(cls, path: Path = TEMPLATES_PATH) -> 'TemplateRegistry':
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise TemplateLoadError(f"cannot load templates from {path}: {e}") from None

        raw_families = data.get("families", {})
        if set(raw_families) != set(FAMILIES):
            raise TemplateLoadError(
                f"expected families {sorted(FAMILIES)}, found {sorted(raw_families)}"
            )

        known_tasks = {t.id for t in taxonomy()}
        families: Dict[str, TemplateFamily] = {}
        for name in FAMILIES:
            templates = []
            for entry in raw_families[name]:
                text = entry.get("text", "")
                try:
                    slots = template_slots(text)
                except ValueError as e:
                    raise TemplateLoadError(f"bad placeholder syntax in '{text}': {e}") from None
                unknown = [s for s in slots if s not in SLOTS]
                if unknown:
                    raise TemplateLoadError(f"unknown placeholder(s) {unknown} in template '{text}'")
                tasks = frozenset(entry.get("tasks", []))
                stray = tasks - known_tasks
                if stray:
                    raise TemplateLoadError(f"template '{text}' names unknown tasks {sorted(stray)}")
                lengths = frozenset(LengthVariant(v) for v in entry.get("lengths", [l.value for l in LengthVariant]))
                templates.append(InstructionTemplate(name, text, tasks, lengths, entry.get("stage")))
            families[name] = TemplateFamily(name, tuple(templates))

        registry = cls(str(data.get("version", "0")), families)
        registry._check_coverage(known_tasks)
        logger.debug(f"Loaded {sum(len(f.templates) for f in families.values())} templates from {path}")
        return registry

    def _check_coverage(self, known_tasks) -> None:
        uncovered = sorted(t for t in known_tasks if t != MULTI_TURN_TASK and t not in self._by_task)
        if uncovered:
            raise TemplateLoadError(f"tasks without templates: {uncovered}")
        missing_stages = [s for s in STAGES if s not in self._by_stage]
        if missing_stages:
            raise TemplateLoadError(f"consultation stages without templates: {missing_stages}")

    def family_of(self, task: str) -> str:
        if task == MULTI_TURN_TASK:
            return "multi_turn"
        return self.select(task, LengthVariant.MEDIUM, "").family

    def select(self, task: str, length: LengthVariant, key: str) -> InstructionTemplate:
        """Deterministic template choice for a task/length, spread over images by key"""
        candidates = [t for t in self._by_task.get(task, []) if length in t.lengths]
        if not candidates:
            raise MissingTaskBlock(f"no template for task '{task}' at length '{length.value}'")
        return candidates[_stable_index(f"{key}|{task}|{length.value}", len(candidates))]

    def stage_template(self, stage: str, key: str) -> InstructionTemplate:
        candidates = self._by_stage.get(stage, [])
        if not candidates:
            raise MissingTaskBlock(f"no template for consultation stage '{stage}'")
        return candidates[_stable_index(f"{key}|{stage}", len(candidates))]


@lru_cache(maxsize=1)
def default_templates() -> TemplateRegistry:
    return TemplateRegistry.load()
