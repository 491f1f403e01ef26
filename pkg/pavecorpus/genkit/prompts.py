"""System prompt composition: domain rules, then standards, then the task block"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional

from pavecorpus import settings
from pavecorpus.errors import MissingTaskBlock, TemplateLoadError

logger = logging.getLogger("pavecorpus.genkit.prompts")

PROMPT_BLOCKS_PATH = settings.DATA_DIR / "prompt_blocks.json"

DOMAIN_HEADER = "### Domain terminology"
STANDARDS_HEADER = "### Standards compliance"
TASK_HEADER = "### Task constraints"


@dataclass(frozen=True, slots=True)
class PromptSpec:
    domain_block: str
    standards_block: str
    task_block: str
    task: str

    def render(self) -> str:
        return (
            f"{DOMAIN_HEADER}\n{self.domain_block}\n\n"
            f"{STANDARDS_HEADER}\n{self.standards_block}\n\n"
            f"{TASK_HEADER}\n{self.task_block}\n"
        )


@dataclass(frozen=True, slots=True)
class BlockRegistry:
    version: str
    domain: str
    standards: str
    tasks: Dict[str, str]
    stages: Dict[str, str]

    @classmethod
    def load(cls, path: Path = PROMPT_BLOCKS_PATH) -> 'BlockRegistry':
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            registry = cls(
                version=str(data["version"]),
                domain=data["domain"].strip(),
                standards=data["standards"].strip(),
                tasks={k: v.strip() for k, v in data["tasks"].items()},
                stages={k: v.strip() for k, v in data.get("stages", {}).items()},
            )
        except (OSError, KeyError, AttributeError, json.JSONDecodeError) as e:
            raise TemplateLoadError(f"cannot load prompt blocks from {path}: {e}") from None
        if not registry.domain or not registry.standards:
            raise TemplateLoadError("domain and standards blocks must be non-empty")
        return registry


@lru_cache(maxsize=1)
def default_blocks() -> BlockRegistry:
    return BlockRegistry.load()


def compose_prompt(task: str, blocks: Optional[BlockRegistry] = None) -> PromptSpec:
    blocks = blocks or default_blocks()
    task_block = blocks.tasks.get(task)
    if not task_block:
        raise MissingTaskBlock(f"no task block registered for '{task}'")
    return PromptSpec(blocks.domain, blocks.standards, task_block, task)


def compose_stage_prompt(stage: str, blocks: Optional[BlockRegistry] = None) -> PromptSpec:
    """Prompt for one consultation stage of a multi-turn record"""
    blocks = blocks or default_blocks()
    stage_block = blocks.stages.get(stage)
    if not stage_block:
        raise MissingTaskBlock(f"no stage block registered for '{stage}'")
    return PromptSpec(blocks.domain, blocks.standards, stage_block, f"stage:{stage}")
