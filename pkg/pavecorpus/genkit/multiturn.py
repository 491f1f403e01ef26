"""Multi-turn consultations: staged questions that deepen turn by turn, closed by a task answer"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

from pavecorpus.errors import TurnCountOutOfRange
from pavecorpus.genkit.generator import DEFAULT_OPTIONS, GenerationOptions, make_record_id, respond
from pavecorpus.genkit.prompts import PromptSpec, compose_prompt, compose_stage_prompt
from pavecorpus.genkit.provider import Provider
from pavecorpus.genkit.scene import (
    build_answer,
    condition_name,
    count_phrase,
    fmt_box,
    most_severe,
    needs_immediate_repair,
    ranked,
    safety_note,
    severity_summary,
    treatment_of,
)
from pavecorpus.genkit.templates import LENGTH_SUFFIX, STAGES, TemplateRegistry, default_templates
from pavecorpus.models.annotation import UnifiedAnnotation
from pavecorpus.models.instruction import InstructionRecord, LengthVariant, Role, Turn
from pavecorpus.taxonomy import MULTI_TURN_TASK, get_task
from pavecorpus.vocabulary import treatment_for

logger = logging.getLogger("pavecorpus.genkit.multiturn")

MIN_TURNS = 2
MAX_TURNS = 8

DEFAULT_TURN_WEIGHTS: Dict[int, float] = {2: 0.35, 3: 0.30, 4: 0.15, 5: 0.08, 6: 0.05, 7: 0.04, 8: 0.03}

_COST = (
    ("reconstruction", "high"),
    ("full-depth", "high"),
    ("mill and overlay", "high"),
    ("partial-depth", "moderate"),
    ("replacement", "moderate"),
    ("patching", "moderate"),
    ("rut filling", "moderate"),
    ("frame", "moderate"),
    ("spot repair", "moderate"),
)


def check_turn_count(turn_count: int) -> None:
    if not MIN_TURNS <= turn_count <= MAX_TURNS:
        raise TurnCountOutOfRange(
            f"turn_count must be between {MIN_TURNS} and {MAX_TURNS}, got {turn_count}"
        )


def consultation_stages(turn_count: int) -> Tuple[str, ...]:
    """Stages asked before the closing task turn"""
    check_turn_count(turn_count)
    return STAGES[: turn_count - 1]


def _cost_class(treatment: str) -> str:
    for marker, cost in _COST:
        if marker in treatment:
            return cost
    return "low"


def stage_answer(stage: str, annotation: UnifiedAnnotation) -> str:
    order = ranked(annotation)
    if stage == "observation":
        if not order:
            return f"No distress is recorded; the surface appears {condition_name(annotation)}."
        listed = "; ".join(f"{inst.label} at {fmt_box(inst.box, annotation)}" for inst in order)
        return f"I can see {count_phrase(annotation)}: {listed}."
    if stage == "priority":
        target = most_severe(annotation)
        if target is None:
            return "Nothing needs priority treatment; keep the section on the routine inspection cycle."
        _, reason = needs_immediate_repair(annotation)
        return f"The {target.label} at {fmt_box(target.box, annotation)} should be addressed first; overall, {reason}."
    if stage == "severity":
        summary = severity_summary(annotation)
        return summary[0].upper() + summary[1:] + "."
    if stage == "treatment":
        if not order:
            return f"Recommended treatment: {treatment_of(annotation, None)}."
        seen: List[str] = []
        for inst in order:
            line = f"{inst.label}: {treatment_for(inst.label, inst.severity)}"
            if line not in seen:
                seen.append(line)
        return "Recommended treatments: " + "; ".join(seen[:4]) + "."
    if stage == "timeline":
        needed, _ = needs_immediate_repair(annotation)
        if needed:
            return "Schedule the repair within two weeks and re-inspect once the work is complete."
        return "Include the section in the next annual maintenance programme and re-inspect in twelve months."
    if stage == "budget":
        treatments: List[str] = []
        for inst in order:
            t = treatment_for(inst.label, inst.severity)
            if t not in treatments:
                treatments.append(t)
        if not treatments:
            treatments.append(treatment_of(annotation, None))
        return "Relative cost: " + "; ".join(f"{t} is {_cost_class(t)} cost" for t in treatments[:4]) + "."
    if stage == "safety":
        return safety_note(annotation)
    raise ValueError(f"unknown consultation stage '{stage}'")


async def build_multiturn(
    annotation: UnifiedAnnotation,
    turn_count: int,
    closing_task: str,
    prompts: Optional[Sequence[PromptSpec]] = None,
    provider: Optional[Provider] = None,
    length: LengthVariant = LengthVariant.MEDIUM,
    templates: Optional[TemplateRegistry] = None,
    options: GenerationOptions = DEFAULT_OPTIONS,
) -> InstructionRecord:
    """Conversation of `turn_count` exchanges; the last one answers `closing_task`"""
    stages = consultation_stages(turn_count)
    closing = get_task(closing_task)
    draft = build_answer(annotation, closing)
    templates = templates or default_templates()
    if prompts is None:
        prompts = [compose_stage_prompt(s) for s in stages] + [compose_prompt(closing.id)]
    if len(prompts) != turn_count:
        raise ValueError(f"expected {turn_count} prompts, got {len(prompts)}")

    key = annotation.image_ref
    history: List[Turn] = []
    for stage, prompt in zip(stages, prompts):
        question = templates.stage_template(stage, key).text
        facts = stage_answer(stage, annotation)
        answer = await respond(
            provider, prompt, question, [annotation], facts, facts, LengthVariant.SHORT, options, history
        )
        history.extend([Turn(Role.USER, question), Turn(Role.ASSISTANT, answer)])

    question = templates.select(closing.id, length, key).fill(draft.slots) + LENGTH_SUFFIX[length]
    answer = await respond(
        provider, prompts[-1], question, [annotation], draft.core, draft.response(length), length, options, history
    )
    history.extend([Turn(Role.USER, question), Turn(Role.ASSISTANT, answer)])

    ground_truth = dict(draft.ground_truth)
    ground_truth["closing_task"] = closing.id
    turns = tuple(history)
    image_refs = (annotation.image_ref,)
    return InstructionRecord(
        record_id=make_record_id(image_refs, MULTI_TURN_TASK, turns),
        image_refs=image_refs,
        task=MULTI_TURN_TASK,
        length=length,
        turns=turns,
        answer_format=closing.native_format,
        source_dataset=annotation.source_dataset,
        ground_truth=ground_truth,
        multi_turn=True,
    )
