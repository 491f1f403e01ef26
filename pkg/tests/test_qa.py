import asyncio
import csv
import warnings

import pytest

from pavecorpus.errors import EmptyStratumWarning, ReviewError
from pavecorpus.genkit import generate_record
from pavecorpus.genkit.scene import satisfies
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord, LengthVariant, Role, Turn
from pavecorpus.qa import (
    FAILURE_CODES,
    describe,
    export_review_bundle,
    load_verdicts,
    merge_verdicts,
    sample_for_review,
    validate_corpus,
    validate_record,
)
from pavecorpus.qa.review import IDS_FILENAME, VERDICTS_TEMPLATE_FILENAME
from pavecorpus.taxonomy import TaskCategory, get_task, taxonomy


def _record(
    answer: str,
    task: str = "pci_assessment",
    question: str = "What is the PCI?",
    record_id: str = "r0",
    ground_truth=None,
    image_refs=("dsps24/s2.jpg",),
    turns=None,
) -> InstructionRecord:
    return InstructionRecord(
        record_id=record_id,
        image_refs=tuple(image_refs),
        task=task,
        length=LengthVariant.SHORT,
        turns=turns or (Turn(Role.USER, question), Turn(Role.ASSISTANT, answer)),
        answer_format=get_task(task).native_format,
        source_dataset="test",
        ground_truth={"image_dims": [640, 480]} if ground_truth is None else ground_truth,
    )


def _codes(record, annotation=None):
    return validate_record(record, annotation).codes


# =========================================================
# RECORD CHECKS
# =========================================================

def test_pci_in_range_passes():
    report = validate_record(_record("Estimated PCI: 41\nCondition: Poor", ground_truth={"pci": 41}))
    assert report.passed
    assert report.verdict == "pass"
    assert report.checks_run == 7


def test_pci_out_of_range():
    assert _codes(_record("Estimated PCI: 105", ground_truth={"pci": 105})) == ["PciOutOfRange"]


def test_numeric_answer_without_pci():
    assert "NumericFormat" in _codes(_record("It looks fine."))


def test_box_outside_image():
    record = _record("pothole [600, 400, 700, 500]", task="single_object_grounding", question="Where is the pothole?")
    assert _codes(record) == ["BoxOutOfImage"]


def test_box_must_match_source(plain_annotation):
    good = _record("longitudinal crack [256, 96, 384, 384]", task="single_object_grounding")
    bad = _record("pothole [0, 0, 10, 10]", task="single_object_grounding")
    assert validate_record(good, plain_annotation).passed
    assert _codes(bad, plain_annotation) == ["BoxNotInSource"]


def test_inverted_and_fractional_boxes():
    assert "BoxInverted" in _codes(_record("pothole [10, 10, 5, 20]", task="single_object_grounding"))
    assert "CoordinateFormat" in _codes(_record("pothole [1.5, 2, 3, 4]", task="single_object_grounding"))


def test_turns_must_alternate():
    turns = (Turn(Role.ASSISTANT, "Estimated PCI: 41"), Turn(Role.USER, "PCI?"))
    assert "TurnStructure" in _codes(_record("", turns=turns))


def test_single_turn_record_with_two_exchanges():
    turns = (
        Turn(Role.USER, "PCI?"), Turn(Role.ASSISTANT, "Estimated PCI: 41"),
        Turn(Role.USER, "Sure?"), Turn(Role.ASSISTANT, "Estimated PCI: 41"),
    )
    assert "TurnStructure" in _codes(_record("", turns=turns))


def test_empty_turn():
    turns = (Turn(Role.USER, "  "), Turn(Role.ASSISTANT, "Estimated PCI: 41"))
    assert "EmptyTurn" in _codes(_record("", turns=turns))


def test_region_answer_vocabulary():
    ok = _record("Distress: pothole\nSeverity: High\nRepair: full-depth patching", task="dense_region_description")
    assert validate_record(ok).passed
    bad_severity = _record("Distress: pothole\nSeverity: Extreme\nRepair: patching", task="dense_region_description")
    assert _codes(bad_severity) == ["SeverityVocabulary"]
    bad_label = _record("Distress: sinkhole\nRepair: patching", task="dense_region_description")
    assert _codes(bad_label) == ["DistressVocabulary"]


def test_region_answer_missing_repair_line():
    assert "MissingRequiredField" in _codes(_record("Distress: pothole", task="dense_region_description"))


def test_severity_phrase_outside_vocabulary():
    record = _record("A critical-severity pothole needs work.", task="safety_analysis")
    assert _codes(record) == ["SeverityVocabulary"]


def test_choice_letter_must_be_offered():
    question = "Which box is the pothole?\n(A) [0, 0, 1, 1]\n(B) [2, 2, 3, 3]\n(C) [4, 4, 5, 5]"
    assert validate_record(_record("Answer: (B)", task="multi_choice_grounding", question=question)).passed
    assert _codes(_record("Answer: (D)", task="multi_choice_grounding", question=question)) == ["ChoiceKeyInvalid"]


def test_checklist_needs_items():
    assert _codes(_record("All fine.", task="checklist_filling")) == ["ChecklistFormat"]
    assert validate_record(_record("- [x] Potholes\n- [ ] Rutting", task="checklist_filling")).passed


def test_image_ref_count():
    record = _record("The first image is worse.", task="multi_image_comparison")
    assert _codes(record) == ["ImageRefCount"]
    pair = _record("The first image is worse.", task="multi_image_comparison", image_refs=("a.jpg", "b.jpg"))
    assert validate_record(pair).passed


def test_unknown_task_is_a_missing_field():
    record = InstructionRecord(
        record_id="x", image_refs=("a.jpg",), task="weather_report", length=LengthVariant.SHORT,
        turns=(Turn(Role.USER, "q"), Turn(Role.ASSISTANT, "a")), answer_format=AnswerFormat.DESCRIPTIVE,
        source_dataset="t", ground_truth={},
    )
    assert "MissingRequiredField" in _codes(record)


def test_every_reported_code_is_registered():
    samples = [
        _record("Estimated PCI: 105"),
        _record("pothole [10, 10, 5, 20]", task="single_object_grounding"),
        _record("Distress: sinkhole\nSeverity: Extreme", task="dense_region_description"),
        _record("Answer: (D)", task="multi_choice_grounding"),
        _record("", task="checklist_filling", image_refs=()),
    ]
    for record in samples:
        for code in validate_record(record).codes:
            assert code in FAILURE_CODES
            assert describe(code)


def test_generated_records_pass(plain_annotation, severity_annotation, pci_annotation):
    for annotation in (plain_annotation, severity_annotation, pci_annotation):
        for task in taxonomy():
            if task.is_multi_turn or task.id == "multi_image_comparison":
                continue
            if not satisfies(annotation, task.requirement):
                continue
            record = asyncio.run(generate_record(annotation, task, LengthVariant.MEDIUM))
            report = validate_record(record, annotation)
            assert report.passed, (task.id, report.failures)


# =========================================================
# CORPUS
# =========================================================

def test_corpus_pass_rate():
    records = [_record("Estimated PCI: 41", record_id=f"ok{i}") for i in range(9)]
    records.append(_record("Estimated PCI: 105", record_id="bad"))
    summary = validate_corpus(records)
    assert summary.total == 10
    assert summary.pass_rate == pytest.approx(0.9)
    assert summary.failure_histogram == {"PciOutOfRange": 1}
    data = summary.to_dict()
    assert data["failed"] == 1
    assert data["failures"][0]["record_id"] == "bad"


def test_empty_corpus_has_no_pass_rate():
    summary = validate_corpus([])
    assert summary.total == 0
    assert summary.pass_rate is None


def test_corpus_uses_annotation_lookup(plain_annotation):
    record = _record("pothole [0, 0, 10, 10]", task="single_object_grounding", image_refs=("pid/images/p1.jpg",))
    summary = validate_corpus([record], {plain_annotation.image_ref: plain_annotation}.get)
    assert summary.failure_histogram == {"BoxNotInSource": 1}


# =========================================================
# REVIEW
# =========================================================

def _review_corpus():
    records = [_record("Estimated PCI: 41", record_id=f"pci{i:02d}") for i in range(8)]
    records += [
        _record("Step 1: look\nConclusion: fine", task="chain_of_thought", record_id=f"cot{i}")
        for i in range(2)
    ]
    return records


def test_review_sample_caps_each_stratum():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyStratumWarning)
        bundle = sample_for_review(_review_corpus(), per_stratum=5, seed=1)
    pci_stratum = (TaskCategory.CONDITION_ASSESSMENT, AnswerFormat.NUMERIC)
    cot_stratum = (TaskCategory.REASONING_ANALYSIS, AnswerFormat.CHAIN_OF_THOUGHT)
    assert bundle.strata == {pci_stratum: 5, cot_stratum: 2}
    assert len(bundle.samples) == 7
    assert cot_stratum in bundle.short_strata
    assert pci_stratum not in bundle.short_strata


def test_review_sample_is_deterministic():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyStratumWarning)
        first = sample_for_review(_review_corpus(), per_stratum=3, seed=9)
        second = sample_for_review(list(reversed(_review_corpus())), per_stratum=3, seed=9)
    assert [r.record_id for r in first.samples] == [r.record_id for r in second.samples]


def test_review_undersupply_warns():
    with pytest.warns(EmptyStratumWarning):
        sample_for_review(_review_corpus(), per_stratum=5)


def test_review_rejects_nonpositive_count():
    with pytest.raises(ValueError):
        sample_for_review(_review_corpus(), per_stratum=0)


def test_review_export_and_merge(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyStratumWarning)
        bundle = sample_for_review(_review_corpus(), per_stratum=2, seed=0)
    paths = export_review_bundle(bundle, tmp_path / "review")
    assert len(paths) == 4 + 2
    assert (tmp_path / "review" / IDS_FILENAME).exists()
    sheet = paths[0].read_text(encoding="utf-8")
    assert sheet.startswith(f"# Review {bundle.samples[0].record_id}")
    assert "## Ground truth" in sheet

    template = tmp_path / "review" / VERDICTS_TEMPLATE_FILENAME
    with template.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert [row["id"] for row in rows] == [r.record_id for r in bundle.samples]

    filled = tmp_path / "verdicts.csv"
    filled.write_text(f"id,verdict,notes\n{rows[0]['id']},accept,clear\n{rows[1]['id']},Reject,box off\n", encoding="utf-8")
    verdicts = load_verdicts(filled)
    assert verdicts[rows[1]["id"]] == {"verdict": "reject", "notes": "box off"}

    merged = merge_verdicts(_review_corpus(), verdicts)
    reviewed = {r.record_id: r.review for r in merged if r.review}
    assert reviewed == {rows[0]["id"]: {"verdict": "accept", "notes": "clear"}, rows[1]["id"]: {"verdict": "reject", "notes": "box off"}}
    assert len(merged) == len(_review_corpus())


def test_merge_unknown_id():
    with pytest.raises(ReviewError):
        merge_verdicts(_review_corpus(), {"nope": {"verdict": "accept", "notes": ""}})


@pytest.mark.parametrize("body", [
    "id,notes\npci00,x\n",
    "id,verdict\npci00,maybe\n",
    "id,verdict\n,accept\n",
    "id,verdict\npci00,accept\npci00,reject\n",
])
def test_bad_verdict_files(tmp_path, body):
    path = tmp_path / "v.csv"
    path.write_text(body, encoding="utf-8")
    with pytest.raises(ReviewError):
        load_verdicts(path)
