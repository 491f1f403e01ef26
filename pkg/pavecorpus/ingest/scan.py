"""Locate annotation files under a dataset root and run the matching parser"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pavecorpus.errors import IngestError, ManifestError, MissingDims
from pavecorpus.ingest.coco import parse_coco
from pavecorpus.ingest.color_folder import parse_color_folder
from pavecorpus.ingest.dims import DIMS_FILENAME, IMAGE_SUFFIXES, build_dims_index, lookup_dims, read_image_dims
from pavecorpus.ingest.pci_csv import parse_pci_csv
from pavecorpus.ingest.voc import parse_voc
from pavecorpus.ingest.yolo import parse_yolo
from pavecorpus.models.annotation import ImageDims
from pavecorpus.models.raw import CocoInstances, RawRecord, VocBoxes

logger = logging.getLogger("pavecorpus.ingest.scan")

FORMATS = ("yolo", "voc", "coco", "color_folder", "pci_csv")


@dataclass(frozen=True, slots=True)
class ScannedItem:
    image_ref: str
    record: RawRecord
    dims: ImageDims


@dataclass(slots=True)
class ScanResult:
    items: List[ScannedItem] = field(default_factory=list)
    files_read: int = 0
    skipped: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def instance_count(self) -> int:
        return sum(item.record.instance_count for item in self.items)


@dataclass(frozen=True, slots=True)
class ScanOptions:
    class_names: Sequence[str] = ()
    annotation_file: Optional[str] = None
    id_column: str = "image"
    pci_column: str = "pci"
    dims_file: Optional[str] = None
    lenient: bool = False


def _guard(result: ScanResult, options: ScanOptions, path: Path, action: Callable[[], None]) -> None:
    """Run one file's work; in lenient mode record the failure and carry on"""
    try:
        action()
    except (IngestError, OSError) as e:
        if not options.lenient:
            raise
        logger.warning(f"Skipping {path}: {e}")
        result.skipped.append((path.as_posix(), str(e)))


def _dims_path(root: Path, options: ScanOptions) -> Path:
    return root / options.dims_file if options.dims_file else root / DIMS_FILENAME


def _scan_yolo(root: Path, options: ScanOptions, result: ScanResult) -> None:
    if not options.class_names:
        raise ManifestError(f"YOLO dataset at {root} needs class_names")
    label_dir = root / "labels" if (root / "labels").is_dir() else root
    images_dir = root / "images"
    candidates = []
    if images_dir.is_dir():
        candidates = [p.relative_to(root).as_posix() for p in sorted(images_dir.iterdir()) if p.suffix.lower() in IMAGE_SUFFIXES]
    index = build_dims_index(root, candidates, _dims_path(root, options))
    by_stem: Dict[str, str] = {Path(ref).stem: ref for ref in sorted(set(candidates) | set(index))}

    for label_file in sorted(label_dir.glob("*.txt")):
        def work(label_file=label_file):
            result.files_read += 1
            image_ref = by_stem.get(label_file.stem)
            if image_ref is None:
                raise MissingDims(f"no image or dims entry for label '{label_file.stem}'", str(label_file))
            text = label_file.read_text(encoding="utf-8")
            record = parse_yolo(text, options.class_names, image_ref=image_ref, path=str(label_file))
            result.items.append(ScannedItem(image_ref, record, lookup_dims(index, image_ref, str(label_file))))
        _guard(result, options, label_file, work)


def _scan_voc(root: Path, options: ScanOptions, result: ScanResult) -> None:
    xml_dir = root / "annotations" if (root / "annotations").is_dir() else root
    for xml_file in sorted(xml_dir.glob("*.xml")):
        def work(xml_file=xml_file):
            result.files_read += 1
            record = parse_voc(xml_file.read_bytes(), path=str(xml_file))
            payload: VocBoxes = record.payload
            image_ref = payload.filename or f"{xml_file.stem}.jpg"
            record = RawRecord(image_ref=image_ref, payload=payload)
            result.items.append(ScannedItem(image_ref, record, payload.dims))
        _guard(result, options, xml_file, work)


def _scan_coco(root: Path, options: ScanOptions, result: ScanResult) -> None:
    doc_path = root / (options.annotation_file or "annotations.json")

    def work():
        result.files_read += 1
        for record in parse_coco(doc_path.read_bytes(), path=str(doc_path)):
            payload: CocoInstances = record.payload
            result.items.append(ScannedItem(record.image_ref, record, payload.dims))
    _guard(result, options, doc_path, work)


def _scan_color_folder(root: Path, options: ScanOptions, result: ScanResult) -> None:
    files = [
        p for p in sorted(root.rglob("*"))
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES and p.parent != root
    ]
    refs = [p.relative_to(root).as_posix() for p in files]
    index = build_dims_index(root, [], _dims_path(root, options))
    for path, ref in zip(files, refs):
        def work(path=path, ref=ref):
            result.files_read += 1
            record = parse_color_folder(path, image_ref=ref)
            dims = index.get(ref) or read_image_dims(path)
            result.items.append(ScannedItem(ref, record, dims))
        _guard(result, options, path, work)


def _scan_pci_csv(root: Path, options: ScanOptions, result: ScanResult) -> None:
    csv_path = root / (options.annotation_file or "pci.csv")

    def work():
        result.files_read += 1
        records = parse_pci_csv(
            csv_path.read_text(encoding="utf-8"),
            id_column=options.id_column,
            pci_column=options.pci_column,
            path=str(csv_path),
        )
        index = build_dims_index(root, [r.image_ref for r in records], _dims_path(root, options))
        for record in records:
            result.items.append(ScannedItem(record.image_ref, record, lookup_dims(index, record.image_ref, str(csv_path))))
    _guard(result, options, csv_path, work)


_SCANNERS = {
    "yolo": _scan_yolo,
    "voc": _scan_voc,
    "coco": _scan_coco,
    "color_folder": _scan_color_folder,
    "pci_csv": _scan_pci_csv,
}


def scan_dataset(root: Path, source_format: str, options: Optional[ScanOptions] = None) -> ScanResult:
    """Parse every annotation file of one dataset, in path-sorted order"""
    options = options or ScanOptions()
    scanner = _SCANNERS.get(source_format)
    if scanner is None:
        raise ManifestError(f"Unknown dataset format '{source_format}' (expected one of {', '.join(FORMATS)})")
    if not root.is_dir():
        raise ManifestError(f"Dataset root {root} does not exist")
    result = ScanResult()
    scanner(root, options, result)
    result.items.sort(key=lambda item: item.image_ref)
    logger.info(
        f"Scanned {root} ({source_format}): {result.files_read} files, "
        f"{len(result.items)} images, {len(result.skipped)} skipped"
    )
    return result
