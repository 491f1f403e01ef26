"""Single-turn record generation in template-only or provider mode"""

import asyncio
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Union

from pavecorpus.errors import GenerationError, IncompatibleAnnotation
from pavecorpus.genkit.prompts import PromptSpec, compose_prompt
from pavecorpus.genkit.provider import (
    Provider,
    ProviderRequest,
    complete_with_retries,
    reference_block,
)
from pavecorpus.genkit.scene import build_answer, scene_lines
from pavecorpus.genkit.templates import LENGTH_SUFFIX, TemplateRegistry, default_templates
from pavecorpus.models.annotation import UnifiedAnnotation
from pavecorpus.models.instruction import InstructionRecord, LengthVariant, Role, Turn
from pavecorpus.taxonomy import TaskType, get_task

logger = logging.getLogger("pavecorpus.genkit.generator")


@dataclass(frozen=True, slots=True)
class GenerationOptions:
    temperature: float = 0.7
    max_tokens: int = 512
    attempts: int = 3
    backoff: float = 1.0


DEFAULT_OPTIONS = GenerationOptions()


def make_record_id(image_refs: Sequence[str], task: str, turns: Sequence[Turn]) -> str:
    """Content hash, so identical generations get identical ids"""
    digest = hashlib.sha256()
    for part in (*image_refs, task, *(f"{t.role.value}:{t.text}" for t in turns)):
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()[:16]


def provider_prompt(
    instruction: str,
    annotations: Sequence[UnifiedAnnotation],
    facts: str,
    length: LengthVariant,
    history: Sequence[Turn] = (),
) -> str:
    """User prompt sent to a provider: scene, prior turns, instruction and the facts to open with"""
    parts = ["Scene:"]
    for annotation in annotations:
        parts.extend(scene_lines(annotation))
    if history:
        parts.append("")
        parts.append("Conversation so far:")
        parts.extend(f"{t.role.value.title()}: {t.text}" for t in history)
    parts.extend([
        "",
        f"Instruction: {instruction}",
        "",
        reference_block(facts),
        f"Length: {length.value}",
        "Open your reply with the reference facts verbatim, then elaborate in your own words.",
    ])
    return "\n".join(parts)


async def respond(
    provider: Optional[Provider],
    prompt: PromptSpec,
    instruction: str,
    annotations: Sequence[UnifiedAnnotation],
    facts: str,
    fallback: str,
    length: LengthVariant,
    options: GenerationOptions = DEFAULT_OPTIONS,
    history: Sequence[Turn] = (),
) -> str:
    """Assistant text for one turn; the fallback is used in template-only mode"""
    if provider is None:
        return fallback
    request = ProviderRequest(
        system_prompt=prompt.render(),
        user_prompt=provider_prompt(instruction, annotations, facts, length, history),
        temperature=options.temperature,
        max_tokens=options.max_tokens,
    )
    reply = await complete_with_retries(provider, request, attempts=options.attempts, base_delay=options.backoff)
    return reply.text.strip()


async def generate_record(
    annotation: UnifiedAnnotation,
    task: Union[TaskType, str],
    length: LengthVariant,
    prompt: Optional[PromptSpec] = None,
    provider: Optional[Provider] = None,
    companions: Sequence[UnifiedAnnotation] = (),
    templates: Optional[TemplateRegistry] = None,
    options: GenerationOptions = DEFAULT_OPTIONS,
) -> InstructionRecord:
    task = get_task(task) if isinstance(task, str) else task
    if task.is_multi_turn:
        raise IncompatibleAnnotation(f"'{task.id}' records are built with build_multiturn")
    draft = build_answer(annotation, task, companions)
    prompt = prompt or compose_prompt(task.id)
    templates = templates or default_templates()

    template = templates.select(task.id, length, annotation.image_ref)
    instruction = template.fill(draft.slots) + LENGTH_SUFFIX[length]
    images = [annotation, *companions]
    response = await respond(
        provider, prompt, instruction, images, draft.core, draft.response(length), length, options
    )

    turns = (Turn(Role.USER, instruction), Turn(Role.ASSISTANT, response))
    image_refs = tuple(img.image_ref for img in images)
    return InstructionRecord(
        record_id=make_record_id(image_refs, task.id, turns),
        image_refs=image_refs,
        task=task.id,
        length=length,
        turns=turns,
        answer_format=task.native_format,
        source_dataset=annotation.source_dataset,
        ground_truth=draft.ground_truth,
    )


@dataclass(slots=True)
class VariantBatch:
    """Outcome of generating every length variant; failures do not discard the others"""

    records: List[InstructionRecord] = field(default_factory=list)
    failures: Dict[LengthVariant, str] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.failures


async def length_variants(
    annotation: UnifiedAnnotation,
    task: Union[TaskType, str],
    prompt: Optional[PromptSpec] = None,
    provider: Optional[Provider] = None,
    companions: Sequence[UnifiedAnnotation] = (),
    templates: Optional[TemplateRegistry] = None,
    options: GenerationOptions = DEFAULT_OPTIONS,
) -> VariantBatch:
    lengths = list(LengthVariant)
    results = await asyncio.gather(
        *(
            generate_record(annotation, task, length, prompt, provider, companions, templates, options)
            for length in lengths
        ),
        return_exceptions=True,
    )
    batch = VariantBatch()
    for length, result in zip(lengths, results):
        if isinstance(result, GenerationError):
            logger.warning(f"{annotation.image_ref}: {length.value} variant failed: {result}")
            batch.failures[length] = str(result)
        elif isinstance(result, BaseException):
            raise result
        else:
            batch.records.append(result)
    return batch
