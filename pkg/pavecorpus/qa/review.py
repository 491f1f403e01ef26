"""Stratified samples for expert review, and merging their verdicts back"""

import csv
import json
import logging
import random
import warnings
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from pavecorpus.errors import EmptyStratumWarning, ReviewError
from pavecorpus.models.instruction import AnswerFormat, InstructionRecord
from pavecorpus.taxonomy import TaskCategory, get_task, taxonomy

logger = logging.getLogger("pavecorpus.qa.review")

VERDICTS = ("accept", "reject")
IDS_FILENAME = "review_ids.csv"
VERDICTS_TEMPLATE_FILENAME = "verdicts_template.csv"

Stratum = Tuple[TaskCategory, AnswerFormat]


def stratum_of(record: InstructionRecord) -> Stratum:
    return get_task(record.task).category, record.answer_format


def expected_strata() -> List[Stratum]:
    """Every (category, format) pair the taxonomy can produce for a single-turn record"""
    return sorted({(t.category, t.native_format) for t in taxonomy()}, key=_stratum_key)


def _stratum_key(stratum: Stratum) -> Tuple[str, str]:
    return stratum[0].value, stratum[1].value


@dataclass(slots=True)
class ReviewBundle:
    samples: List[InstructionRecord] = field(default_factory=list)
    strata: Dict[Stratum, int] = field(default_factory=dict)
    short_strata: List[Stratum] = field(default_factory=list)
    seed: int = 0


def sample_for_review(records: Iterable[InstructionRecord], per_stratum: int, seed: int = 0) -> ReviewBundle:
    """Up to `per_stratum` records from each (task category, answer format) stratum.

    Records are ordered by id before sampling so the draw depends only on the
    corpus contents and the seed. Strata holding fewer records than requested
    are taken whole and reported with an EmptyStratumWarning.
    """
    if per_stratum < 1:
        raise ValueError(f"per_stratum must be >= 1, got {per_stratum}")
    grouped: Dict[Stratum, List[InstructionRecord]] = defaultdict(list)
    for record in records:
        grouped[stratum_of(record)].append(record)

    rng = random.Random(seed)
    bundle = ReviewBundle(seed=seed)
    for stratum in sorted(set(grouped) | set(expected_strata()), key=_stratum_key):
        pool = sorted(grouped.get(stratum, []), key=lambda r: r.record_id)
        if len(pool) < per_stratum:
            bundle.short_strata.append(stratum)
            message = f"stratum {stratum[0].value}/{stratum[1].value} has {len(pool)} of {per_stratum} records"
            warnings.warn(message, EmptyStratumWarning, stacklevel=2)
            logger.warning(message)
            chosen = pool
        else:
            chosen = sorted(rng.sample(pool, per_stratum), key=lambda r: r.record_id)
        if chosen:
            bundle.strata[stratum] = len(chosen)
            bundle.samples.extend(chosen)
    logger.info(f"Sampled {len(bundle.samples)} records from {len(bundle.strata)} strata for review")
    return bundle


# =========================================================
# EXPORT
# =========================================================

def render_sheet(record: InstructionRecord) -> str:
    category, answer_format = stratum_of(record)
    lines = [
        f"# Review {record.record_id}",
        "",
        f"- Task: {record.task}",
        f"- Category: {category.value}",
        f"- Answer format: {answer_format.value}",
        f"- Length: {record.length.value}",
        f"- Images: {', '.join(record.image_refs)}",
        "",
        "## Conversation",
        "",
    ]
    for turn in record.turns:
        lines.append(f"**{turn.role.value.capitalize()}:**")
        lines.append("")
        lines.append(turn.text)
        lines.append("")
    lines += [
        "## Ground truth",
        "",
        "```json",
        json.dumps(record.ground_truth, indent=2, ensure_ascii=False, sort_keys=True),
        "```",
        "",
        "## Verdict",
        "",
        "Record `accept` or `reject` with notes in the verdicts CSV.",
        "",
    ]
    return "\n".join(lines)


def export_review_bundle(bundle: ReviewBundle, out_dir: Path) -> List[Path]:
    """One sheet per sample, an ids CSV and a blank verdicts CSV to fill in"""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    rows = []
    for number, record in enumerate(bundle.samples, start=1):
        category, answer_format = stratum_of(record)
        sheet = out_dir / f"{number:04d}_{record.record_id}.md"
        sheet.write_text(render_sheet(record), encoding="utf-8")
        written.append(sheet)
        rows.append([record.record_id, record.task, category.value, answer_format.value, sheet.name])

    with (out_dir / IDS_FILENAME).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "task", "category", "answer_format", "sheet"])
        writer.writerows(rows)
    with (out_dir / VERDICTS_TEMPLATE_FILENAME).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "verdict", "notes"])
        writer.writerows([row[0], "", ""] for row in rows)
    logger.info(f"Exported {len(written)} review sheets to {out_dir}")
    return written + [out_dir / IDS_FILENAME, out_dir / VERDICTS_TEMPLATE_FILENAME]


# =========================================================
# MERGE
# =========================================================

def load_verdicts(path: Path) -> Dict[str, Dict[str, str]]:
    """Read an id,verdict,notes CSV into {id: {verdict, notes}}"""
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        columns = set(reader.fieldnames or [])
        if not {"id", "verdict"} <= columns:
            raise ReviewError(f"{path}: verdicts CSV needs 'id' and 'verdict' columns, found {sorted(columns)}")
        verdicts: Dict[str, Dict[str, str]] = {}
        for line, row in enumerate(reader, start=2):
            record_id = (row.get("id") or "").strip()
            verdict = (row.get("verdict") or "").strip().lower()
            if not record_id:
                raise ReviewError(f"{path}:{line}: empty id")
            if verdict not in VERDICTS:
                raise ReviewError(f"{path}:{line}: verdict '{row.get('verdict')}' is not accept/reject")
            if record_id in verdicts:
                raise ReviewError(f"{path}:{line}: duplicate verdict for {record_id}")
            verdicts[record_id] = {"verdict": verdict, "notes": (row.get("notes") or "").strip()}
    return verdicts


def merge_verdicts(
    records: Sequence[InstructionRecord],
    verdicts: Mapping[str, Mapping[str, str]],
) -> List[InstructionRecord]:
    """Attach review verdicts; records without a verdict are returned unchanged"""
    known = {r.record_id for r in records}
    unknown = sorted(set(verdicts) - known)
    if unknown:
        raise ReviewError(f"{len(unknown)} verdict id(s) not in corpus, e.g. {unknown[:3]}")
    merged = []
    for record in records:
        verdict = verdicts.get(record.record_id)
        if verdict is None:
            merged.append(record)
            continue
        merged.append(replace(record, review={"verdict": verdict["verdict"], "notes": verdict.get("notes", "")}))
    accepted = sum(1 for v in verdicts.values() if v["verdict"] == "accept")
    logger.info(f"Merged {len(verdicts)} verdicts ({accepted} accepted, {len(verdicts) - accepted} rejected)")
    return merged
