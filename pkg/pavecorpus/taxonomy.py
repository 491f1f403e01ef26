"""Task taxonomy: 32 task types in five categories"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List

from pavecorpus.models.instruction import AnswerFormat


class TaskCategory(str, Enum):
    SPATIAL_REASONING = "SpatialReasoning"
    CONDITION_ASSESSMENT = "ConditionAssessment"
    PROFESSIONAL_WORKFLOW = "ProfessionalWorkflow"
    REASONING_ANALYSIS = "ReasoningAnalysis"
    MULTIMODAL_INTERACTION = "MultiModalInteraction"


class Requirement(str, Enum):
    """Annotation data a task needs before a record can be generated"""

    ANY = "any"
    INSTANCES = "instances"
    TWO_INSTANCES = "two_instances"
    SEVERITY = "severity"
    CONDITION = "condition"  # condition class or a PCI score it can be derived from
    PCI = "pci"
    MULTI_IMAGE = "multi_image"


@dataclass(frozen=True, slots=True)
class TaskType:
    id: str
    category: TaskCategory
    native_format: AnswerFormat
    requirement: Requirement
    title: str

    @property
    def is_multi_turn(self) -> bool:
        return self.id == MULTI_TURN_TASK


_C = AnswerFormat.COORDINATES
_D = AnswerFormat.DESCRIPTIVE
_S = AnswerFormat.SHORT_ANSWER
_M = AnswerFormat.MULTIPLE_CHOICE
_T = AnswerFormat.CHAIN_OF_THOUGHT
_N = AnswerFormat.NUMERIC
_K = AnswerFormat.CHECKLIST

_SP = TaskCategory.SPATIAL_REASONING
_CA = TaskCategory.CONDITION_ASSESSMENT
_PW = TaskCategory.PROFESSIONAL_WORKFLOW
_RA = TaskCategory.REASONING_ANALYSIS
_MM = TaskCategory.MULTIMODAL_INTERACTION

_TASKS = (
    TaskType("single_object_grounding", _SP, _C, Requirement.INSTANCES, "Single object grounding"),
    TaskType("multi_object_enumeration", _SP, _C, Requirement.INSTANCES, "Multi-object enumeration"),
    TaskType("spatial_relationship_analysis", _SP, _D, Requirement.TWO_INSTANCES, "Spatial relationship analysis"),
    TaskType("referring_expression_comprehension", _SP, _C, Requirement.INSTANCES, "Referring expression comprehension"),
    TaskType("dense_region_description", _SP, _D, Requirement.INSTANCES, "Dense region description"),
    TaskType("counting_with_grounding", _SP, _C, Requirement.INSTANCES, "Counting with grounding"),
    TaskType("ranking_and_size_analysis", _SP, _C, Requirement.INSTANCES, "Ranking and size analysis"),
    TaskType("multi_choice_grounding", _SP, _M, Requirement.INSTANCES, "Multi-choice grounding"),
    TaskType("attribute_grounding", _SP, _D, Requirement.INSTANCES, "Attribute grounding"),

    TaskType("pci_assessment", _CA, _N, Requirement.PCI, "PCI assessment"),
    TaskType("severity_classification", _CA, _S, Requirement.SEVERITY, "Severity classification"),
    TaskType("condition_classification", _CA, _S, Requirement.CONDITION, "Condition classification"),
    TaskType("performance_assessment", _CA, _D, Requirement.CONDITION, "Performance assessment"),
    TaskType("quick_assessment", _CA, _S, Requirement.ANY, "Quick assessment"),
    TaskType("detailed_engineering_analysis", _CA, _D, Requirement.ANY, "Detailed engineering analysis"),
    TaskType("distress_identification", _CA, _S, Requirement.INSTANCES, "Distress identification"),

    TaskType("infrastructure_analysis", _PW, _D, Requirement.ANY, "Infrastructure analysis"),
    TaskType("treatment_recommendation", _PW, _D, Requirement.ANY, "Treatment recommendation"),
    TaskType("safety_analysis", _PW, _D, Requirement.ANY, "Safety analysis"),
    TaskType("field_practical_assessment", _PW, _D, Requirement.ANY, "Field practical assessment"),
    TaskType("checklist_filling", _PW, _K, Requirement.ANY, "Checklist filling"),
    TaskType("maintenance_decision", _PW, _D, Requirement.ANY, "Maintenance decision"),

    TaskType("chain_of_thought", _RA, _T, Requirement.ANY, "Chain-of-thought"),
    TaskType("complex_engineering_reasoning", _RA, _T, Requirement.ANY, "Complex engineering reasoning"),
    TaskType("comparative_analysis", _RA, _D, Requirement.INSTANCES, "Comparative analysis"),
    TaskType("corrective_reasoning", _RA, _D, Requirement.ANY, "Corrective reasoning"),
    TaskType("step_by_step_reasoning", _RA, _T, Requirement.ANY, "Step-by-step reasoning"),
    TaskType("counterfactual_analysis", _RA, _D, Requirement.ANY, "Counterfactual analysis"),

    TaskType("multi_length_caption", _MM, _D, Requirement.ANY, "Multi-length caption"),
    TaskType("multi_turn_consultation", _MM, _D, Requirement.ANY, "Multi-turn consultation"),
    TaskType("multi_image_comparison", _MM, _D, Requirement.MULTI_IMAGE, "Multi-image comparison"),
    TaskType("scene_summarization", _MM, _D, Requirement.ANY, "Scene summarization"),
)

MULTI_TURN_TASK = "multi_turn_consultation"
MULTI_IMAGE_TASK = "multi_image_comparison"

# Tasks whose answers carry Distress/Severity/Repair key lines
REGION_TASKS = frozenset({"dense_region_description", "attribute_grounding", "treatment_recommendation"})
CAPTION_TASKS = frozenset({"multi_length_caption", "scene_summarization"})
CLASSIFICATION_TASKS = frozenset({"severity_classification", "condition_classification"})

_BY_ID: Dict[str, TaskType] = {t.id: t for t in _TASKS}


def taxonomy() -> List[TaskType]:
    """All task types in stable order"""
    return list(_TASKS)


def get_task(task_id: str) -> TaskType:
    try:
        return _BY_ID[task_id]
    except KeyError:
        raise KeyError(f"Unknown task type '{task_id}'") from None


def tasks_in(category: TaskCategory) -> List[TaskType]:
    return [t for t in _TASKS if t.category is category]


def tasks_with_format(answer_format: AnswerFormat, single_turn_only: bool = True) -> List[TaskType]:
    return [
        t for t in _TASKS
        if t.native_format is answer_format and not (single_turn_only and t.is_multi_turn)
    ]
