"""Seeded corpus planning: which annotation, task, length and turn style each record gets"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from pavecorpus.errors import InfeasibleMix
from pavecorpus.genkit.multiturn import DEFAULT_TURN_WEIGHTS, check_turn_count
from pavecorpus.genkit.scene import satisfies
from pavecorpus.models.annotation import UnifiedAnnotation
from pavecorpus.models.instruction import AnswerFormat, LengthVariant
from pavecorpus.taxonomy import MULTI_TURN_TASK, Requirement, TaskType, taxonomy, tasks_with_format

logger = logging.getLogger("pavecorpus.genkit.planner")

DEFAULT_FORMAT_MIX: Dict[AnswerFormat, float] = {
    AnswerFormat.COORDINATES: 0.31,
    AnswerFormat.DESCRIPTIVE: 0.192,
    AnswerFormat.SHORT_ANSWER: 0.16,
    AnswerFormat.CHAIN_OF_THOUGHT: 0.15,
    AnswerFormat.MULTIPLE_CHOICE: 0.08,
    AnswerFormat.NUMERIC: 0.06,
    AnswerFormat.CHECKLIST: 0.048,
}
DEFAULT_MULTI_TURN_FRACTION = 0.206
MIX_TOLERANCE = 1e-6


@dataclass(frozen=True, slots=True)
class MixConfig:
    multi_turn_fraction: float = DEFAULT_MULTI_TURN_FRACTION
    answer_formats: Dict[AnswerFormat, float] = field(default_factory=lambda: dict(DEFAULT_FORMAT_MIX))
    records_per_annotation: int = 1
    turn_weights: Dict[int, float] = field(default_factory=lambda: dict(DEFAULT_TURN_WEIGHTS))
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.multi_turn_fraction <= 1.0:
            raise InfeasibleMix(f"multi-turn fraction {self.multi_turn_fraction} outside [0, 1]")
        if any(v < 0 for v in self.answer_formats.values()):
            raise InfeasibleMix("answer-format fractions must be non-negative")
        total = sum(self.answer_formats.values())
        if abs(total - 1.0) > MIX_TOLERANCE:
            raise InfeasibleMix(f"answer-format fractions sum to {total}, expected 1")
        if self.records_per_annotation < 1:
            raise InfeasibleMix("records_per_annotation must be at least 1")
        for turns in self.turn_weights:
            check_turn_count(turns)
        if not any(w > 0 for w in self.turn_weights.values()):
            raise InfeasibleMix("turn-count weights must include a positive weight")


@dataclass(frozen=True, slots=True)
class PlanItem:
    slot: int
    annotation_index: int
    task: str
    length: LengthVariant
    answer_format: AnswerFormat
    multi_turn: bool = False
    turn_count: int = 1
    closing_task: Optional[str] = None
    companions: Tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class CorpusPlan:
    items: Tuple[PlanItem, ...]
    seed: int

    def __len__(self) -> int:
        return len(self.items)

    @property
    def multi_turn_count(self) -> int:
        return sum(1 for item in self.items if item.multi_turn)

    def format_counts(self) -> Dict[AnswerFormat, int]:
        return dict(Counter(item.answer_format for item in self.items))

    def task_counts(self) -> Dict[str, int]:
        return dict(Counter(item.task for item in self.items))


def apportion(total: int, fractions: Dict[AnswerFormat, float]) -> Dict[AnswerFormat, int]:
    """Largest-remainder split of `total`; ties go to the earlier format"""
    order = [fmt for fmt in AnswerFormat if fractions.get(fmt, 0.0) > 0]
    quotas = {fmt: total * fractions[fmt] for fmt in order}
    counts = {fmt: int(quotas[fmt]) for fmt in order}
    leftover = total - sum(counts.values())
    by_remainder = sorted(order, key=lambda fmt: (-(quotas[fmt] - counts[fmt]), order.index(fmt)))
    for fmt in by_remainder[:leftover]:
        counts[fmt] += 1
    return counts


class _Planner:
    def __init__(self, annotations: Sequence[UnifiedAnnotation], mix: MixConfig):
        self.annotations = annotations
        self.mix = mix
        self.rng = random.Random(mix.seed)
        self.pool = len(annotations)
        self.order = {t.id: i for i, t in enumerate(taxonomy())}
        self.task_use: Counter = Counter()
        self.ann_use: Counter = Counter()
        self.taken: Set[Tuple[int, str, bool, LengthVariant]] = set()
        self._compatible: Dict[Requirement, List[int]] = {}

    def compatible(self, task: TaskType) -> List[int]:
        if task.requirement not in self._compatible:
            self._compatible[task.requirement] = [
                i for i, ann in enumerate(self.annotations)
                if satisfies(ann, task.requirement, pool_size=self.pool)
            ]
        return self._compatible[task.requirement]

    def candidate_tasks(self, fmt: AnswerFormat, closing: bool) -> List[TaskType]:
        tasks = [
            t for t in tasks_with_format(fmt)
            if self.compatible(t) and not (closing and t.requirement is Requirement.MULTI_IMAGE)
        ]
        return sorted(tasks, key=lambda t: (self.task_use[t.id], self.order[t.id]))

    def pick_annotation(self, task: TaskType, multi: bool, length: LengthVariant) -> Optional[Tuple[int, LengthVariant]]:
        lengths = [length] + [v for v in LengthVariant if v is not length]
        for candidate_length in lengths:
            free = [
                i for i in self.compatible(task)
                if (i, task.id, multi, candidate_length) not in self.taken
            ]
            if free:
                return min(free, key=lambda i: (self.ann_use[i], i)), candidate_length
        return None

    def assign(self, slot: int, fmt: AnswerFormat, multi: bool, fixed: Optional[TaskType]) -> PlanItem:
        length = self.rng.choice(list(LengthVariant))
        turn_count = 1
        if multi:
            weights = self.mix.turn_weights
            turn_count = self.rng.choices(list(weights), weights=list(weights.values()))[0]

        tasks = [fixed] if fixed is not None else self.candidate_tasks(fmt, closing=multi)
        for task in tasks:
            picked = self.pick_annotation(task, multi, length)
            if picked is None:
                continue
            index, length = picked
            self.taken.add((index, task.id, multi, length))
            self.task_use[task.id] += 1
            self.ann_use[index] += 1
            companions: Tuple[int, ...] = ()
            if task.requirement is Requirement.MULTI_IMAGE:
                others = [i for i in range(self.pool) if i != index]
                k = min(len(others), self.rng.choice([1, 2]))
                companions = tuple(self.rng.sample(others, k))
            return PlanItem(
                slot=slot,
                annotation_index=index,
                task=MULTI_TURN_TASK if multi else task.id,
                length=length,
                answer_format=fmt,
                multi_turn=multi,
                turn_count=turn_count,
                closing_task=task.id if multi else None,
                companions=companions,
            )
        raise InfeasibleMix(
            f"no annotation in the pool of {self.pool} supports another {fmt.value} "
            f"{'multi-turn' if multi else 'single-turn'} record"
        )

    def plan(self) -> CorpusPlan:
        total = self.mix.records_per_annotation * self.pool
        if total == 0:
            return CorpusPlan(items=(), seed=self.mix.seed)
        counts = apportion(total, self.mix.answer_formats)
        n_multi = int(total * self.mix.multi_turn_fraction + 0.5)

        formats: List[AnswerFormat] = [fmt for fmt in AnswerFormat for _ in range(counts.get(fmt, 0))]
        self.rng.shuffle(formats)

        # one slot per coverable task, as long as enough slots remain for the multi-turn share
        reserved: Dict[int, TaskType] = {}
        free_by_format: Dict[AnswerFormat, List[int]] = {}
        for slot, fmt in enumerate(formats):
            free_by_format.setdefault(fmt, []).append(slot)
        for task in taxonomy():
            if task.is_multi_turn or not self.compatible(task):
                continue
            if len(reserved) >= total - n_multi:
                break
            slots = free_by_format.get(task.native_format)
            if slots:
                reserved[slots.pop(0)] = task

        open_slots = [slot for slot in range(total) if slot not in reserved]
        self.rng.shuffle(open_slots)
        multi_slots = set(open_slots[:n_multi])

        items = [
            self.assign(slot, fmt, slot in multi_slots, reserved.get(slot))
            for slot, fmt in enumerate(formats)
        ]
        uncovered = [t.id for t in taxonomy() if not t.is_multi_turn and self.task_use[t.id] == 0]
        if uncovered:
            logger.info(f"Plan leaves {len(uncovered)} task(s) without records: {', '.join(uncovered)}")
        return CorpusPlan(items=tuple(items), seed=self.mix.seed)


def plan_corpus(annotations: Sequence[UnifiedAnnotation], mix: Optional[MixConfig] = None) -> CorpusPlan:
    """Deterministic plan matching the format mix exactly and the multi-turn share to the nearest record"""
    mix = mix or MixConfig()
    plan = _Planner(annotations, mix).plan()
    logger.info(
        f"Planned {len(plan)} records over {len(annotations)} annotations "
        f"({plan.multi_turn_count} multi-turn, seed {mix.seed})"
    )
    return plan
