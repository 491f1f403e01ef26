"""Reference answers and ground truth derived from an annotation

Every task has a builder producing the core answer (the facts the response
must state), the template slot values, and the structured ground truth.
Length variants add elaboration sentences after the core answer.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pavecorpus.errors import IncompatibleAnnotation
from pavecorpus.harmonize.spatial import COINCIDENT, DIRECTION_WORDS, spatial_relations
from pavecorpus.models.annotation import BoxAbs, ConditionLabel, Instance, Severity, UnifiedAnnotation
from pavecorpus.models.instruction import LengthVariant
from pavecorpus.taxonomy import Requirement, TaskType, get_task
from pavecorpus.vocabulary import DISTRESS_NOTES, default_alias_table, treatment_for

CHOICE_LETTERS = ("A", "B", "C", "D")

ELABORATION_COUNT = {LengthVariant.SHORT: 0, LengthVariant.MEDIUM: 2, LengthVariant.LONG: 4}

_SEVERITY_RANK = {None: 0, Severity.LOW: 1, Severity.MEDIUM: 2, Severity.HIGH: 3}
_STRUCTURAL = {"alligator crack", "pothole", "rut", "block crack"}

CONDITION_TREATMENT = {
    ConditionLabel.GOOD: "routine monitoring",
    ConditionLabel.FAIR: "preventive surface sealing",
    ConditionLabel.POOR: "mill and overlay",
    ConditionLabel.FAILED: "full reconstruction",
}

PERFORMANCE = {
    ConditionLabel.GOOD: "Ride quality is smooth and the structure carries traffic without visible fatigue.",
    ConditionLabel.FAIR: "Ride quality is acceptable but surface wear will accelerate without preventive work.",
    ConditionLabel.POOR: "Ride quality is reduced and the structure shows load-related deterioration.",
    ConditionLabel.FAILED: "The surface no longer performs its structural role and needs reconstruction.",
}

PROGRESSION = {
    "pothole": "water and traffic would enlarge the pothole and undermine the base",
    "alligator crack": "the cracked area would break into loose pieces and form potholes",
    "rut": "the depression would deepen and pond water in the wheel path",
    "manhole": "the frame would continue to settle and loosen the surrounding asphalt",
    "patch": "the patch edges would open and admit water",
}

HAZARDS = {
    "pothole": "potholes can damage tyres and cause loss of vehicle control",
    "manhole": "settled covers create abrupt bumps for vehicles and cyclists",
    "rut": "ruts hold water and raise the risk of hydroplaning",
    "alligator crack": "loose fragments from fatigue cracking can become projectiles",
    "edge crack": "a deteriorating edge reduces lateral support near the shoulder",
}

GENERIC_SENTENCES = (
    "Distress types and severity levels follow ASTM D6433 definitions.",
    "Field verification is recommended before committing maintenance funds.",
    "Photographs should be retaken after treatment to confirm the repair.",
    "Drainage around the section should be checked during the next visit.",
)

CHECKLIST_ITEMS: Tuple[Tuple[str, Callable[[UnifiedAnnotation], bool]], ...] = (
    ("Longitudinal or transverse cracking", lambda a: bool({"longitudinal crack", "transverse crack"} & set(a.labels))),
    ("Alligator or block cracking", lambda a: bool({"alligator crack", "block crack"} & set(a.labels))),
    ("Potholes", lambda a: "pothole" in a.labels),
    ("Patches or previous repairs", lambda a: bool({"patch", "repair/other"} & set(a.labels))),
    ("Utility covers", lambda a: "manhole" in a.labels),
    ("Rutting", lambda a: "rut" in a.labels),
    ("Condition rated Poor or worse", lambda a: (
        a.effective_condition is not None
        and a.effective_condition.label in (ConditionLabel.POOR, ConditionLabel.FAILED)
    )),
)


@dataclass(frozen=True, slots=True)
class AnswerDraft:
    core: str
    slots: Dict[str, str]
    ground_truth: Dict[str, Any]
    elaboration: Tuple[str, ...] = field(default_factory=tuple)

    def response(self, length: LengthVariant) -> str:
        extra = self.elaboration[:ELABORATION_COUNT[length]]
        return self.core if not extra else f"{self.core}\n{' '.join(extra)}"


# =========================================================
# HELPERS
# =========================================================

def fmt_box(box: BoxAbs, annotation: UnifiedAnnotation) -> str:
    x1, y1, x2, y2 = box.rendered(annotation.dims)
    return f"[{x1}, {y1}, {x2}, {y2}]"


def ranked_indices(annotation: UnifiedAnnotation) -> List[int]:
    """Instance positions by descending box area, source order breaking ties"""
    return sorted(range(len(annotation.instances)), key=lambda i: (-annotation.instances[i].box.area, i))


def ranked(annotation: UnifiedAnnotation) -> List[Instance]:
    return [annotation.instances[i] for i in ranked_indices(annotation)]


def unique_labels(instances: Sequence[Instance]) -> List[str]:
    seen: List[str] = []
    for inst in instances:
        if inst.label not in seen:
            seen.append(inst.label)
    return seen


def _stable(key: str, size: int) -> int:
    return int(hashlib.sha256(key.encode("utf-8")).hexdigest()[:8], 16) % size


def _plural(n: int, word: str) -> str:
    return f"{n} {word}" if n == 1 else f"{n} {word}es" if word.endswith("h") else f"{n} {word}s"


def condition_name(annotation: UnifiedAnnotation) -> str:
    cond = annotation.effective_condition
    return cond.label.value if cond else "unrated"


def most_severe(annotation: UnifiedAnnotation) -> Optional[Instance]:
    order = ranked(annotation)
    if not order:
        return None
    return max(order, key=lambda inst: (_SEVERITY_RANK[inst.severity], inst.label in _STRUCTURAL))


def treatment_of(annotation: UnifiedAnnotation, inst: Optional[Instance]) -> str:
    if inst is not None:
        return treatment_for(inst.label, inst.severity)
    cond = annotation.effective_condition
    return CONDITION_TREATMENT[cond.label] if cond else treatment_for(None)


def needs_immediate_repair(annotation: UnifiedAnnotation) -> Tuple[bool, str]:
    if any(inst.severity is Severity.HIGH for inst in annotation.instances):
        return True, "a distress is recorded at high severity"
    if "pothole" in annotation.labels:
        return True, "an open pothole is present"
    cond = annotation.effective_condition
    if cond and cond.label in (ConditionLabel.POOR, ConditionLabel.FAILED):
        return True, f"the section is rated {cond.label.value}"
    return False, "no distress requires emergency work"


def count_phrase(annotation: UnifiedAnnotation) -> str:
    labels = annotation.labels
    parts = [_plural(labels.count(label), label) for label in unique_labels(ranked(annotation))]
    if not parts:
        return "no recorded distress"
    if len(parts) == 1:
        return parts[0]
    return ", ".join(parts[:-1]) + " and " + parts[-1]


def severity_summary(annotation: UnifiedAnnotation) -> str:
    rated = [inst for inst in ranked(annotation) if inst.severity is not None]
    if not rated:
        return "the source survey does not rate severity for these distresses"
    return "; ".join(f"{inst.label} rated {inst.severity.value}" for inst in rated[:4])


def _elaboration(annotation: UnifiedAnnotation) -> Tuple[str, ...]:
    sentences: List[str] = []
    order = ranked(annotation)
    for label in unique_labels(order)[:2]:
        sentences.append(f"The {label} {DISTRESS_NOTES[label]}.")
    cond = annotation.effective_condition
    if cond is not None:
        low, high = cond.pci_range
        sentences.append(
            f"The section rates {cond.label.value}, a class covering scores {low} to {high} on the condition index."
        )
    focus = most_severe(annotation)
    if focus is not None:
        sentences.append(f"A suitable treatment for the {focus.label} is {treatment_of(annotation, focus)}.")
    sentences.extend(GENERIC_SENTENCES)
    return tuple(sentences)


def base_ground_truth(annotation: UnifiedAnnotation) -> Dict[str, Any]:
    return {
        "boxes": [],
        "labels": [],
        "severity": None,
        "pci": None,
        "condition": None,
        "choice": None,
        "answer": None,
        "distress": None,
        "repair": None,
        "checklist": None,
        "image_dims": annotation.dims.to_list(),
    }


def base_slots(annotation: UnifiedAnnotation, companions: Sequence[UnifiedAnnotation]) -> Dict[str, str]:
    order = ranked(annotation)
    focus = order[0] if order else None
    cond = annotation.effective_condition
    return {
        "class": focus.label if focus else "pavement surface",
        "box": fmt_box(focus.box, annotation) if focus else fmt_box(BoxAbs(0, 0, annotation.dims.width, annotation.dims.height), annotation),
        "severity": focus.severity.value if focus and focus.severity else "unrated",
        "pci": annotation.pci.display() if annotation.pci else "unknown",
        "count": str(len(order)),
        "boxes": "; ".join(f"{inst.label} {fmt_box(inst.box, annotation)}" for inst in order),
        "condition": cond.label.value if cond else "unrated",
        "options": "",
        "answer": "",
        "treatment": treatment_of(annotation, most_severe(annotation)),
        "image_count": str(1 + len(companions)),
        "expression": "",
        "claim": "",
    }


def satisfies(annotation: UnifiedAnnotation, requirement: Requirement, pool_size: int = 1) -> bool:
    if requirement is Requirement.ANY:
        return True
    if requirement is Requirement.INSTANCES:
        return len(annotation.instances) >= 1
    if requirement is Requirement.TWO_INSTANCES:
        return len(annotation.instances) >= 2
    if requirement is Requirement.SEVERITY:
        return annotation.has_severity
    if requirement is Requirement.CONDITION:
        return annotation.effective_condition is not None
    if requirement is Requirement.PCI:
        return annotation.pci is not None
    if requirement is Requirement.MULTI_IMAGE:
        return pool_size >= 2
    return False


def scene_lines(annotation: UnifiedAnnotation) -> List[str]:
    """Textual scene for provider prompts: one 'label, severity, [x1,y1,x2,y2]' line per instance"""
    lines = [f"Image: {annotation.image_ref} ({annotation.dims.width}x{annotation.dims.height})"]
    for inst in annotation.instances:
        x1, y1, x2, y2 = inst.box.rendered(annotation.dims)
        severity = inst.severity.value if inst.severity else "n/a"
        lines.append(f"{inst.label}, {severity}, [{x1},{y1},{x2},{y2}]")
    if annotation.effective_condition is not None:
        lines.append(f"Condition: {annotation.effective_condition.label.value}")
    if annotation.pci is not None:
        lines.append(f"PCI: {annotation.pci.display()}")
    return lines


# =========================================================
# TASK BUILDERS
# =========================================================

@dataclass(slots=True)
class _Ctx:
    annotation: UnifiedAnnotation
    companions: Sequence[UnifiedAnnotation]
    order: List[Instance]
    positions: List[int]
    slots: Dict[str, str]
    gt: Dict[str, Any]

    @property
    def focus(self) -> Optional[Instance]:
        return self.order[0] if self.order else None

    def box(self, inst: Instance) -> str:
        return fmt_box(inst.box, self.annotation)

    def rendered(self, inst: Instance) -> List[int]:
        return inst.box.rendered(self.annotation.dims)

    def ground(self, instances: Sequence[Instance]) -> None:
        self.gt["boxes"] = [self.rendered(i) for i in instances]
        self.gt["labels"] = [i.label for i in instances]

    def region_fields(self, inst: Optional[Instance]) -> str:
        distress = inst.label if inst else "none"
        repair = treatment_of(self.annotation, inst)
        self.gt["distress"] = distress
        self.gt["repair"] = repair
        lines = [f"Distress: {distress}"]
        if inst is not None and inst.severity is not None:
            self.gt["severity"] = inst.severity.value
            lines.append(f"Severity: {inst.severity.value}")
        lines.append(f"Repair: {repair}")
        return "\n".join(lines)


def _single_object_grounding(c: _Ctx) -> str:
    c.ground([c.focus])
    return f"{c.focus.label} {c.box(c.focus)}"


def _multi_object_enumeration(c: _Ctx) -> str:
    c.ground(c.order)
    return "\n".join(f"{inst.label} {c.box(inst)}" for inst in c.order)


def _spatial_relationship_analysis(c: _Ctx) -> str:
    a, b = c.order[0], c.order[1]
    ia, ib = c.positions[0], c.positions[1]
    cell = spatial_relations(c.annotation).cell(ia, ib)
    c.ground([a, b])
    if cell.direction == COINCIDENT:
        where = f"The {b.label} {c.box(b)} is centred on the {a.label} {c.box(a)}."
    else:
        where = f"The {b.label} {c.box(b)} lies to the {DIRECTION_WORDS[cell.direction]} of the {a.label} {c.box(a)}."
    return f"{where} Their centres are {cell.center_distance:.0f} px apart and the boxes overlap with IoU {cell.overlap_iou:.2f}."


def _referring_expression_comprehension(c: _Ctx) -> str:
    focus = c.focus
    expression = f"the {focus.label}"
    if len(c.order) >= 2:
        other = c.order[1]
        io, i_f = c.positions[1], c.positions[0]
        direction = spatial_relations(c.annotation).cell(io, i_f).direction
        if direction != COINCIDENT:
            expression = f"the {focus.label} to the {DIRECTION_WORDS[direction]} of the {other.label}"
        else:
            expression = f"the larger {focus.label}" if focus.label == other.label else f"the {focus.label} centred on the {other.label}"
    elif c.annotation.labels.count(focus.label) > 1:
        expression = f"the largest {focus.label}"
    c.slots["expression"] = expression
    c.ground([focus])
    return f"{focus.label} {c.box(focus)}"


def _dense_region_description(c: _Ctx) -> str:
    focus = c.focus
    c.gt["boxes"] = [c.rendered(focus)]
    c.gt["labels"] = [focus.label]
    return f"Region {c.box(focus)}: a {focus.label} that {DISTRESS_NOTES[focus.label]}.\n{c.region_fields(focus)}"


def _counting_with_grounding(c: _Ctx) -> str:
    label = c.focus.label
    matching = [inst for inst in c.order if inst.label == label]
    c.slots["class"] = label
    c.slots["count"] = str(len(matching))
    c.ground(matching)
    c.gt["answer"] = str(len(matching))
    return f"Count: {len(matching)}\n" + "\n".join(f"{inst.label} {c.box(inst)}" for inst in matching)


def _ranking_and_size_analysis(c: _Ctx) -> str:
    c.ground(c.order)
    return "\n".join(
        f"{rank}. {inst.label} {c.box(inst)}, area {inst.box.area:.0f} px"
        for rank, inst in enumerate(c.order, start=1)
    )


def _distractor_boxes(c: _Ctx, correct: List[int]) -> List[List[int]]:
    W, H = c.annotation.dims.width, c.annotation.dims.height
    x1, y1, x2, y2 = correct
    dx, dy = max(1, W // 4), max(1, H // 4)
    shifts = [(dx, 0), (-dx, 0), (0, dy), (0, -dy), (dx, dy), (-dx, -dy), (dx, -dy), (-dx, dy)]
    out: List[List[int]] = []
    for sx, sy in shifts:
        cand = [
            min(max(x1 + sx, 0), W), min(max(y1 + sy, 0), H),
            min(max(x2 + sx, 0), W), min(max(y2 + sy, 0), H),
        ]
        if cand[2] > cand[0] and cand[3] > cand[1] and cand != correct and cand not in out:
            out.append(cand)
        if len(out) == 3:
            return out
    corner = 1
    while len(out) < 3:
        cand = [0, 0, min(corner, W), min(corner, H)]
        if cand != correct and cand not in out:
            out.append(cand)
        corner += 1
    return out


def _multi_choice_grounding(c: _Ctx) -> str:
    focus = c.focus
    correct = c.rendered(focus)
    options = _distractor_boxes(c, correct)
    position = _stable(f"{c.annotation.image_ref}|choice", len(CHOICE_LETTERS))
    options.insert(position, correct)
    letter = CHOICE_LETTERS[position]
    c.slots["options"] = "\n".join(
        f"({CHOICE_LETTERS[i]}) [{b[0]}, {b[1]}, {b[2]}, {b[3]}]" for i, b in enumerate(options)
    )
    c.ground([focus])
    c.gt["choice"] = letter
    c.gt["answer"] = letter
    return f"Answer: ({letter}) {c.box(focus)}"


def _attribute_grounding(c: _Ctx) -> str:
    focus = c.focus
    c.gt["boxes"] = [c.rendered(focus)]
    c.gt["labels"] = [focus.label]
    return c.region_fields(focus)


def _pci_assessment(c: _Ctx) -> str:
    pci = c.annotation.pci
    cond = c.annotation.effective_condition
    low, high = cond.pci_range
    c.gt["pci"] = pci.value
    c.gt["condition"] = cond.label.value
    return (
        f"Estimated PCI: {pci.display()}\n"
        f"Condition: {cond.label.value}\n"
        f"The score sits in the {low} to {high} band that defines {cond.label.value} pavement."
    )


def _severity_classification(c: _Ctx) -> str:
    rated = [inst for inst in c.order if inst.severity is not None]
    focus = rated[0]
    c.slots["class"] = focus.label
    c.slots["box"] = c.box(focus)
    c.slots["severity"] = focus.severity.value
    c.gt["severity"] = focus.severity.value
    c.gt["answer"] = focus.severity.value
    c.gt["boxes"] = [c.rendered(focus)]
    c.gt["labels"] = [focus.label]
    return f"Answer: {focus.severity.value}\nThe {focus.label} is rated {focus.severity.value} under the survey criteria."


def _condition_classification(c: _Ctx) -> str:
    cond = c.annotation.effective_condition
    c.gt["condition"] = cond.label.value
    c.gt["answer"] = cond.label.value
    return f"Answer: {cond.label.value}"


def _performance_assessment(c: _Ctx) -> str:
    cond = c.annotation.effective_condition
    c.gt["condition"] = cond.label.value
    return f"Condition: {cond.label.value}. {PERFORMANCE[cond.label]}"


def _quick_assessment(c: _Ctx) -> str:
    needed, reason = needs_immediate_repair(c.annotation)
    answer = "Yes" if needed else "No"
    c.gt["answer"] = answer
    return f"Answer: {answer}\nReason: {reason}."


def _detailed_engineering_analysis(c: _Ctx) -> str:
    c.ground(c.order[:5])
    lines = []
    for inst in c.order[:5]:
        rating = f"rated {inst.severity.value}" if inst.severity else "severity not rated"
        lines.append(f"- {inst.label} at {c.box(inst)}, {rating}: it {DISTRESS_NOTES[inst.label]}.")
    if not lines:
        lines.append("No distress is recorded in this image.")
    lines.append(f"Overall condition: {condition_name(c.annotation)}.")
    return "\n".join(lines)


def _distress_identification(c: _Ctx) -> str:
    labels = unique_labels(c.order)
    c.gt["labels"] = labels
    c.gt["answer"] = ", ".join(labels)
    return f"Answer: {', '.join(labels)}"


def _infrastructure_analysis(c: _Ctx) -> str:
    structural = sorted(set(c.annotation.labels) & _STRUCTURAL)
    concern = (
        f"load-related damage is present ({', '.join(structural)})" if structural
        else "damage appears limited to the surface layer"
    )
    return (
        f"The section shows {count_phrase(c.annotation)}. "
        f"Overall condition: {condition_name(c.annotation)}. Structural assessment: {concern}."
    )


def _treatment_recommendation(c: _Ctx) -> str:
    return c.region_fields(most_severe(c.annotation))


def safety_note(annotation: UnifiedAnnotation) -> str:
    order = ranked(annotation)
    hazards = [HAZARDS[label] for label in unique_labels(order) if label in HAZARDS]
    if not hazards:
        if order:
            return "The recorded distresses pose no immediate hazard, but they should be treated before they worsen."
        return "No immediate hazard is evident on this section."
    return "Safety concerns: " + "; ".join(hazards) + "."


def _safety_analysis(c: _Ctx) -> str:
    return safety_note(c.annotation)


def _field_practical_assessment(c: _Ctx) -> str:
    return (
        f"Site note: {count_phrase(c.annotation)} logged. "
        f"Condition {condition_name(c.annotation)}. Action: {c.slots['treatment']}."
    )


def _checklist_filling(c: _Ctx) -> str:
    marks = [check(c.annotation) for _, check in CHECKLIST_ITEMS]
    c.gt["checklist"] = marks
    return "\n".join(f"- [{'x' if mark else ' '}] {item}" for (item, _), mark in zip(CHECKLIST_ITEMS, marks))


def _maintenance_decision(c: _Ctx) -> str:
    needed, reason = needs_immediate_repair(c.annotation)
    target = most_severe(c.annotation)
    subject = f"the {target.label}" if target else "the section"
    priority = "urgent" if needed else "routine"
    return f"Decision: apply {c.slots['treatment']} to {subject}. Priority: {priority}, because {reason}."


def _chain_of_thought(c: _Ctx) -> str:
    labels = unique_labels(c.order)
    return "\n".join([
        f"Step 1: Identify the distresses present: {', '.join(labels) if labels else 'none recorded'}.",
        f"Step 2: Check their severity: {severity_summary(c.annotation)}.",
        f"Step 3: Relate them to the overall condition: {condition_name(c.annotation)}.",
        f"Conclusion: the section calls for {c.slots['treatment']}.",
    ])


def _complex_engineering_reasoning(c: _Ctx) -> str:
    focus = most_severe(c.annotation)
    mechanism = f"the {focus.label} {DISTRESS_NOTES[focus.label]}" if focus else "no distress mechanism is active"
    needed, reason = needs_immediate_repair(c.annotation)
    return "\n".join([
        f"Step 1: Inventory: {count_phrase(c.annotation)}.",
        f"Step 2: Mechanism: {mechanism}.",
        f"Step 3: Severity: {severity_summary(c.annotation)}.",
        f"Step 4: Urgency: {'intervene now' if needed else 'monitor'} because {reason}.",
        f"Conclusion: apply {c.slots['treatment']}.",
    ])


def _comparative_analysis(c: _Ctx) -> str:
    a = c.order[0]
    first = most_severe(c.annotation)
    if len(c.order) == 1:
        return (
            f"The {a.label} {c.box(a)} is the only recorded distress, so it needs attention first. "
            f"It {DISTRESS_NOTES[a.label]}."
        )
    b = c.order[-1]
    c.ground([a, b])
    ratio = a.box.area / b.box.area if b.box.area else 0.0
    return (
        f"The {a.label} {c.box(a)} covers {a.box.area:.0f} px, about {ratio:.1f} times the {b.label} {c.box(b)}. "
        f"The {first.label} needs attention first."
    )


def _wrong_label(label: str) -> str:
    canonical = default_alias_table().canonical
    return canonical[(canonical.index(label) + 1) % len(canonical)]


def _corrective_reasoning(c: _Ctx) -> str:
    focus = c.focus
    if focus is not None:
        wrong = _wrong_label(focus.label)
        c.slots["claim"] = f"The distress at {c.box(focus)} is a {wrong}."
        c.gt["distress"] = focus.label
        return f"The assessment is incorrect. The distress at {c.box(focus)} is a {focus.label}, not a {wrong}."
    cond = c.annotation.effective_condition
    if cond is not None:
        labels = [label for label in ConditionLabel]
        wrong = labels[(labels.index(cond.label) + 2) % len(labels)]
        c.slots["claim"] = f"This pavement is in {wrong.value} condition."
        c.gt["condition"] = cond.label.value
        return f"The assessment is incorrect. The pavement is in {cond.label.value} condition, not {wrong.value}."
    c.slots["claim"] = "This image shows a pothole."
    return "The assessment is incorrect. No distress is recorded in this image."


def _counterfactual_analysis(c: _Ctx) -> str:
    focus = most_severe(c.annotation)
    if focus is None:
        return "If the section were left untreated, normal ageing would slowly oxidise the surface; routine monitoring is enough."
    progression = PROGRESSION.get(focus.label, "the crack would widen and let water reach the base")
    c.slots["class"] = focus.label
    return (
        f"If the {focus.label} were left untreated, {progression}. "
        f"Treating it now with {treatment_of(c.annotation, focus)} avoids that escalation."
    )


def _multi_length_caption(c: _Ctx) -> str:
    if not c.order:
        return f"Pavement surface in {condition_name(c.annotation)} condition with no recorded distress."
    return f"Pavement surface showing {count_phrase(c.annotation)}."


def _scene_summarization(c: _Ctx) -> str:
    return f"Summary: {count_phrase(c.annotation)}; overall condition {condition_name(c.annotation)}."


def _badness(annotation: UnifiedAnnotation) -> Tuple[int, int, int]:
    cond = annotation.effective_condition
    cond_rank = list(ConditionLabel).index(cond.label) if cond else 0
    return (
        sum(_SEVERITY_RANK[i.severity] + (2 if i.label in _STRUCTURAL else 1) for i in annotation.instances),
        cond_rank,
        len(annotation.instances),
    )


def _multi_image_comparison(c: _Ctx) -> str:
    images = [c.annotation, *c.companions]
    lines = [
        f"Image {i}: {count_phrase(img)}, condition {condition_name(img)}."
        for i, img in enumerate(images, start=1)
    ]
    worst = max(range(len(images)), key=lambda i: (_badness(images[i]), -i))
    c.gt["answer"] = f"Image {worst + 1}"
    c.gt["labels"] = [label for img in images for label in unique_labels(ranked(img))]
    lines.append(f"Image {worst + 1} is in the worse condition.")
    return "\n".join(lines)


_BUILDERS: Dict[str, Callable[[_Ctx], str]] = {
    "single_object_grounding": _single_object_grounding,
    "multi_object_enumeration": _multi_object_enumeration,
    "spatial_relationship_analysis": _spatial_relationship_analysis,
    "referring_expression_comprehension": _referring_expression_comprehension,
    "dense_region_description": _dense_region_description,
    "counting_with_grounding": _counting_with_grounding,
    "ranking_and_size_analysis": _ranking_and_size_analysis,
    "multi_choice_grounding": _multi_choice_grounding,
    "attribute_grounding": _attribute_grounding,
    "pci_assessment": _pci_assessment,
    "severity_classification": _severity_classification,
    "condition_classification": _condition_classification,
    "performance_assessment": _performance_assessment,
    "quick_assessment": _quick_assessment,
    "detailed_engineering_analysis": _detailed_engineering_analysis,
    "distress_identification": _distress_identification,
    "infrastructure_analysis": _infrastructure_analysis,
    "treatment_recommendation": _treatment_recommendation,
    "safety_analysis": _safety_analysis,
    "field_practical_assessment": _field_practical_assessment,
    "checklist_filling": _checklist_filling,
    "maintenance_decision": _maintenance_decision,
    "chain_of_thought": _chain_of_thought,
    "complex_engineering_reasoning": _complex_engineering_reasoning,
    "comparative_analysis": _comparative_analysis,
    "corrective_reasoning": _corrective_reasoning,
    "step_by_step_reasoning": _chain_of_thought,
    "counterfactual_analysis": _counterfactual_analysis,
    "multi_length_caption": _multi_length_caption,
    "scene_summarization": _scene_summarization,
    "multi_image_comparison": _multi_image_comparison,
}


def build_answer(
    annotation: UnifiedAnnotation,
    task: TaskType,
    companions: Sequence[UnifiedAnnotation] = (),
) -> AnswerDraft:
    """Core answer, slot values and ground truth for one task over one annotation"""
    if not satisfies(annotation, task.requirement, pool_size=1 + len(companions)):
        raise IncompatibleAnnotation(
            f"task '{task.id}' needs {task.requirement.value} data that '{annotation.image_ref}' lacks"
        )
    builder = _BUILDERS.get(task.id)
    if builder is None:
        raise IncompatibleAnnotation(f"task '{task.id}' has no single-turn answer builder")
    ctx = _Ctx(
        annotation=annotation,
        companions=companions,
        order=ranked(annotation),
        positions=ranked_indices(annotation),
        slots=base_slots(annotation, companions),
        gt=base_ground_truth(annotation),
    )
    core = builder(ctx)
    return AnswerDraft(core=core, slots=ctx.slots, ground_truth=ctx.gt, elaboration=_elaboration(annotation))


def build_answer_for(annotation: UnifiedAnnotation, task_id: str, companions: Sequence[UnifiedAnnotation] = ()) -> AnswerDraft:
    return build_answer(annotation, get_task(task_id), companions)
