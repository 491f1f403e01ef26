"""Pipeline service: ingest, generate, validate, stats and review over one manifest"""

import asyncio
import json
import logging
import pathlib
import warnings
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from tqdm import tqdm
from tqdm.asyncio import tqdm_asyncio

from pavecorpus.errors import (
    EmptyStratumWarning,
    GenerationError,
    GeometryError,
    IngestError,
    PaveCorpusError,
    UnknownLabel,
)
from pavecorpus.genkit.generator import GenerationOptions, generate_record
from pavecorpus.genkit.multiturn import build_multiturn
from pavecorpus.genkit.planner import MixConfig, PlanItem, plan_corpus
from pavecorpus.genkit.provider import Provider, make_provider
from pavecorpus.harmonize.geometry import harmonize_annotation
from pavecorpus.harmonize.unify import unify
from pavecorpus.ingest.scan import scan_dataset
from pavecorpus.models.annotation import UnifiedAnnotation
from pavecorpus.models.instruction import InstructionRecord
from pavecorpus.qa.review import export_review_bundle, load_verdicts, merge_verdicts, sample_for_review
from pavecorpus.qa.validator import CorpusValidation, validate_corpus, validate_record
from pavecorpus.report.render import render_csv, render_table
from pavecorpus.report.stats import CorpusStats, compute_stats
from pavecorpus.repos.jsonl_store import AnnotationRepository, CorpusRepository
from pavecorpus.repos.manifest import DatasetEntry, Manifest, check_roots
from pavecorpus.vocabulary import AliasTable, default_alias_table

logger = logging.getLogger("pavecorpus.services.pipeline_service")

ANNOTATIONS_FILE = "annotations.jsonl"
INGEST_SUMMARY_FILE = "ingest_summary.json"
CORPUS_FILE = "corpus.jsonl"
GENERATE_SUMMARY_FILE = "generate_summary.json"
VALIDATION_FILE = "validation.json"
STATS_CSV_FILE = "stats.csv"
STATS_TABLE_FILE = "stats.txt"
REVIEW_DIR = "review"


def write_json(path: pathlib.Path, data: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


@dataclass(slots=True)
class DatasetSummary:
    name: str
    format: str
    files_read: int = 0
    images: int = 0
    instances: int = 0
    skipped: List[Tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "format": self.format,
            "files_read": self.files_read,
            "images": self.images,
            "instances": self.instances,
            "errors": len(self.skipped),
            "skipped": [{"path": p, "error": e} for p, e in self.skipped],
        }


@dataclass(slots=True)
class IngestSummary:
    alias_table_version: str
    datasets: List[DatasetSummary] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return sum(len(d.skipped) for d in self.datasets)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alias_table_version": self.alias_table_version,
            "images": sum(d.images for d in self.datasets),
            "instances": sum(d.instances for d in self.datasets),
            "errors": self.error_count,
            "datasets": [d.to_dict() for d in self.datasets],
        }


@dataclass(slots=True)
class GenerateSummary:
    seed: int
    provider: str
    planned: int = 0
    written: int = 0
    multi_turn: int = 0
    regenerated: int = 0
    dropped: List[Dict[str, Any]] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "provider": self.provider,
            "planned": self.planned,
            "written": self.written,
            "multi_turn": self.multi_turn,
            "regenerated": self.regenerated,
            "dropped": self.dropped,
            "errors": self.errors,
        }


class PipelineService:
    """Runs the corpus stages for one manifest, reading and writing under its output directory"""

    def __init__(
        self,
        manifest: Manifest,
        lenient: bool = False,
        provider_name: Optional[str] = None,
        out_dir: Optional[pathlib.Path] = None,
        alias_table: Optional[AliasTable] = None,
        show_progress: bool = True,
    ):
        self.manifest = manifest
        self.lenient = lenient
        self.provider_name = provider_name or manifest.provider.name
        self.out_dir = pathlib.Path(out_dir) if out_dir else manifest.output_dir
        self.alias_table = alias_table or default_alias_table()
        self.show_progress = show_progress
        self.annotations = AnnotationRepository(self.out_dir / ANNOTATIONS_FILE)
        self.corpus = CorpusRepository(self.out_dir / CORPUS_FILE)

    # =========================================================
    # INGEST
    # =========================================================

    def _ingest_dataset(self, entry: DatasetEntry, annotations: List[UnifiedAnnotation]) -> DatasetSummary:
        summary = DatasetSummary(entry.name, entry.format)
        scan = scan_dataset(entry.root, entry.format, entry.scan_options(self.lenient))
        summary.files_read = scan.files_read
        summary.skipped.extend(scan.skipped)
        target = self.manifest.generation.target_dims
        for item in tqdm(scan.items, desc=f"ingest {entry.name}", unit="img", disable=not self.show_progress):
            try:
                annotation = unify(
                    item.record,
                    item.dims,
                    alias_table=self.alias_table,
                    source_dataset=entry.name,
                    alias_dataset=entry.alias_dataset,
                    class_names=entry.class_names,
                    strict=self.manifest.generation.strict_boxes,
                )
                if target is not None:
                    annotation = harmonize_annotation(annotation, target)
            except (IngestError, GeometryError, UnknownLabel) as e:
                if not self.lenient:
                    raise
                logger.warning(f"Skipping {entry.name}/{item.image_ref}: {e}")
                summary.skipped.append((f"{entry.name}/{item.image_ref}", str(e)))
                continue
            annotations.append(replace(annotation, image_ref=f"{entry.name}/{annotation.image_ref}"))
            summary.images += 1
            summary.instances += len(annotation.instances)
        return summary

    def ingest(self) -> IngestSummary:
        check_roots(self.manifest)
        summary = IngestSummary(alias_table_version=self.alias_table.version)
        annotations: List[UnifiedAnnotation] = []
        for entry in self.manifest.datasets:
            summary.datasets.append(self._ingest_dataset(entry, annotations))
        self.annotations.write_all(annotations)
        write_json(self.out_dir / INGEST_SUMMARY_FILE, summary.to_dict())
        logger.info(
            f"Ingested {len(annotations)} annotations from {len(summary.datasets)} datasets "
            f"({summary.error_count} skipped)"
        )
        return summary

    # =========================================================
    # GENERATE
    # =========================================================

    def _load_annotations(self) -> List[UnifiedAnnotation]:
        if not self.annotations.exists:
            raise PaveCorpusError(f"no annotation store at {self.annotations.path}; run ingest first")
        return self.annotations.read_all()

    def _mix(self) -> MixConfig:
        gen = self.manifest.generation
        return MixConfig(
            multi_turn_fraction=gen.multi_turn_fraction,
            answer_formats=dict(gen.answer_formats),
            records_per_annotation=gen.records_per_annotation,
            seed=gen.seed,
        )

    def _options(self) -> GenerationOptions:
        return GenerationOptions(
            temperature=self.manifest.provider.temperature,
            max_tokens=self.manifest.provider.max_tokens,
        )

    async def _build(
        self,
        item: PlanItem,
        annotations: List[UnifiedAnnotation],
        provider: Optional[Provider],
        options: GenerationOptions,
    ) -> InstructionRecord:
        annotation = annotations[item.annotation_index]
        if item.multi_turn:
            return await build_multiturn(
                annotation,
                item.turn_count,
                item.closing_task,
                provider=provider,
                length=item.length,
                options=options,
            )
        companions = [annotations[i] for i in item.companions]
        return await generate_record(
            annotation, item.task, item.length, provider=provider, companions=companions, options=options
        )

    async def _produce(
        self,
        item: PlanItem,
        annotations: List[UnifiedAnnotation],
        provider: Optional[Provider],
        options: GenerationOptions,
        summary: GenerateSummary,
    ) -> Optional[InstructionRecord]:
        """One planned record through generation and the QA gate, regenerating once on failure"""
        annotation = annotations[item.annotation_index]
        try:
            record = await self._build(item, annotations, provider, options)
            report = validate_record(record, annotation)
            if not report.passed:
                logger.warning(f"Slot {item.slot} failed QA ({', '.join(report.codes)}); regenerating")
                summary.regenerated += 1
                record = await self._build(item, annotations, provider, options)
                report = validate_record(record, annotation)
        except GenerationError as e:
            if not self.lenient:
                raise
            logger.warning(f"Slot {item.slot} ({item.task}) failed: {e}")
            summary.errors.append({"slot": item.slot, "task": item.task, "error": str(e)})
            return None
        if not report.passed:
            logger.warning(f"Dropping slot {item.slot} ({item.task}): {', '.join(report.codes)}")
            summary.dropped.append({"slot": item.slot, "task": item.task, "codes": report.codes})
            return None
        return record

    async def generate(self) -> GenerateSummary:
        """Plan, generate, gate through QA, write the corpus and its statistics"""
        annotations = self._load_annotations()
        plan = plan_corpus(annotations, self._mix())
        provider = make_provider(self.provider_name, self.manifest.provider.model, self.manifest.provider.max_in_flight)
        options = self._options()
        summary = GenerateSummary(seed=plan.seed, provider=self.provider_name, planned=len(plan))
        tasks = [
            asyncio.ensure_future(self._produce(item, annotations, provider, options, summary))
            for item in plan.items
        ]
        try:
            results = await tqdm_asyncio.gather(
                *tasks, desc="generate", unit="rec", disable=not self.show_progress
            )
        except BaseException:
            for task in tasks:
                task.cancel()
            await asyncio.gather(*tasks, return_exceptions=True)
            raise
        finally:
            if provider is not None:
                await provider.close()

        records: List[InstructionRecord] = []
        seen = set()
        for record in results:
            if record is None:
                continue
            if record.record_id in seen:
                logger.warning(f"Duplicate record {record.record_id} skipped")
                continue
            seen.add(record.record_id)
            records.append(record)
        summary.dropped.sort(key=lambda d: d["slot"])
        summary.errors.sort(key=lambda d: d["slot"])

        summary.written = self.corpus.write_all(records)
        summary.multi_turn = sum(1 for r in records if r.multi_turn)
        write_json(self.out_dir / GENERATE_SUMMARY_FILE, summary.to_dict())
        self._write_stats(compute_stats(records))
        logger.info(
            f"Generated {summary.written}/{summary.planned} records "
            f"({len(summary.dropped)} dropped, {len(summary.errors)} errors)"
        )
        return summary

    def run_generate(self) -> GenerateSummary:
        return asyncio.run(self.generate())

    # =========================================================
    # VALIDATE / STATS
    # =========================================================

    def _load_corpus(self) -> List[InstructionRecord]:
        if not self.corpus.exists:
            raise PaveCorpusError(f"no corpus at {self.corpus.path}; run generate first")
        return self.corpus.read_all()

    def validate(self) -> CorpusValidation:
        index = self.annotations.index() if self.annotations.exists else {}
        result = validate_corpus(self._load_corpus(), index.get)
        write_json(self.out_dir / VALIDATION_FILE, result.to_dict())
        return result

    def _write_stats(self, stats: CorpusStats) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        (self.out_dir / STATS_CSV_FILE).write_text(render_csv(stats), encoding="utf-8")
        (self.out_dir / STATS_TABLE_FILE).write_text(render_table(stats), encoding="utf-8")

    def stats(self) -> CorpusStats:
        stats = compute_stats(self._load_corpus())
        self._write_stats(stats)
        return stats

    # =========================================================
    # REVIEW
    # =========================================================

    def review_export(self, per_stratum: int, seed: Optional[int] = None) -> Tuple[List[pathlib.Path], int]:
        """Write review sheets; returns the files and the number of undersupplied strata"""
        seed = self.manifest.seed if seed is None else seed
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyStratumWarning)
            bundle = sample_for_review(self._load_corpus(), per_stratum, seed)
        return export_review_bundle(bundle, self.out_dir / REVIEW_DIR), len(bundle.short_strata)

    def review_merge(self, verdicts_path: pathlib.Path) -> int:
        """Attach verdicts to the corpus in place; returns how many records were reviewed"""
        verdicts = load_verdicts(pathlib.Path(verdicts_path))
        merged = merge_verdicts(self._load_corpus(), verdicts)
        self.corpus.write_all(merged)
        return len(verdicts)
