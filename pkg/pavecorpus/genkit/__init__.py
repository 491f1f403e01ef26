from pavecorpus.genkit.generator import (
    GenerationOptions,
    VariantBatch,
    generate_record,
    length_variants,
    make_record_id,
)
from pavecorpus.genkit.multiturn import DEFAULT_TURN_WEIGHTS, build_multiturn, stage_answer
from pavecorpus.genkit.planner import DEFAULT_FORMAT_MIX, CorpusPlan, MixConfig, PlanItem, plan_corpus
from pavecorpus.genkit.prompts import BlockRegistry, PromptSpec, compose_prompt, compose_stage_prompt
from pavecorpus.genkit.provider import (
    MockProvider,
    Provider,
    ProviderRequest,
    ProviderResponse,
    RemoteProvider,
    complete_with_retries,
    make_provider,
)
from pavecorpus.genkit.scene import AnswerDraft, build_answer, scene_lines
from pavecorpus.genkit.templates import InstructionTemplate, TemplateFamily, TemplateRegistry, default_templates

__all__ = [
    "AnswerDraft",
    "BlockRegistry",
    "CorpusPlan",
    "DEFAULT_FORMAT_MIX",
    "DEFAULT_TURN_WEIGHTS",
    "GenerationOptions",
    "InstructionTemplate",
    "MixConfig",
    "MockProvider",
    "PlanItem",
    "PromptSpec",
    "Provider",
    "ProviderRequest",
    "ProviderResponse",
    "RemoteProvider",
    "TemplateFamily",
    "TemplateRegistry",
    "VariantBatch",
    "build_answer",
    "build_multiturn",
    "complete_with_retries",
    "compose_prompt",
    "compose_stage_prompt",
    "default_templates",
    "generate_record",
    "length_variants",
    "make_provider",
    "make_record_id",
    "plan_corpus",
    "scene_lines",
    "stage_answer",
]
