"""Run manifest: source datasets, generation mix, provider and output settings"""

import logging
import pathlib
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from pavecorpus.errors import ManifestError
from pavecorpus.genkit.planner import DEFAULT_FORMAT_MIX, DEFAULT_MULTI_TURN_FRACTION
from pavecorpus.genkit.provider import PROVIDER_NAMES
from pavecorpus.ingest.scan import FORMATS, ScanOptions
from pavecorpus.models.annotation import ImageDims
from pavecorpus.models.instruction import AnswerFormat

logger = logging.getLogger("pavecorpus.repos.manifest")

SECRET_KEYS = frozenset({"api_key", "apikey", "token", "secret"})


@dataclass(frozen=True, slots=True)
class DatasetEntry:
    name: str
    format: str
    root: pathlib.Path
    class_names: Tuple[str, ...] = ()
    alias_dataset: Optional[str] = None
    annotation_file: Optional[str] = None
    id_column: str = "image"
    pci_column: str = "pci"
    dims_file: Optional[str] = None

    def scan_options(self, lenient: bool = False) -> ScanOptions:
        return ScanOptions(
            class_names=self.class_names,
            annotation_file=self.annotation_file,
            id_column=self.id_column,
            pci_column=self.pci_column,
            dims_file=self.dims_file,
            lenient=lenient,
        )


@dataclass(frozen=True, slots=True)
class GenerationSettings:
    seed: int = 0
    records_per_annotation: int = 1
    multi_turn_fraction: float = DEFAULT_MULTI_TURN_FRACTION
    answer_formats: Dict[AnswerFormat, float] = field(default_factory=lambda: dict(DEFAULT_FORMAT_MIX))
    target_dims: Optional[ImageDims] = None
    strict_boxes: bool = True


@dataclass(frozen=True, slots=True)
class ProviderSettings:
    name: str = "template"
    model: Optional[str] = None
    temperature: float = 0.7
    max_tokens: int = 512
    max_in_flight: int = 4


@dataclass(frozen=True, slots=True)
class Manifest:
    path: pathlib.Path
    datasets: Tuple[DatasetEntry, ...]
    generation: GenerationSettings
    provider: ProviderSettings
    output_dir: pathlib.Path

    @property
    def seed(self) -> int:
        return self.generation.seed

    def dataset(self, name: str) -> DatasetEntry:
        for entry in self.datasets:
            if entry.name == name:
                return entry
        raise ManifestError(f"{self.path}: no dataset named '{name}'")


# =========================================================
# LOADING
# =========================================================

def _find_secrets(data: Any, where: str = "") -> List[str]:
    found = []
    if isinstance(data, dict):
        for key, value in data.items():
            if str(key).lower() in SECRET_KEYS:
                found.append(f"{where}{key}")
            found += _find_secrets(value, f"{where}{key}.")
    elif isinstance(data, list):
        for number, value in enumerate(data):
            found += _find_secrets(value, f"{where}{number}.")
    return found


def _table(data: Dict[str, Any], key: str, path: pathlib.Path) -> Dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ManifestError(f"{path}: [{key}] must be a table")
    return value


def _dataset(raw: Dict[str, Any], base: pathlib.Path, path: pathlib.Path) -> DatasetEntry:
    name = raw.get("name")
    if not name:
        raise ManifestError(f"{path}: every [[datasets]] entry needs a name")
    fmt = raw.get("format")
    if fmt not in FORMATS:
        raise ManifestError(f"{path}: dataset '{name}' has format '{fmt}' (expected one of {', '.join(FORMATS)})")
    if not raw.get("root"):
        raise ManifestError(f"{path}: dataset '{name}' needs a root path")
    class_names = raw.get("class_names", [])
    if not isinstance(class_names, list) or not all(isinstance(c, str) for c in class_names):
        raise ManifestError(f"{path}: dataset '{name}' class_names must be a list of strings")
    if fmt == "yolo" and not class_names:
        raise ManifestError(f"{path}: yolo dataset '{name}' needs class_names")
    return DatasetEntry(
        name=name,
        format=fmt,
        root=(base / raw["root"]).resolve(),
        class_names=tuple(class_names),
        alias_dataset=raw.get("alias_dataset"),
        annotation_file=raw.get("annotation_file"),
        id_column=raw.get("id_column", "image"),
        pci_column=raw.get("pci_column", "pci"),
        dims_file=raw.get("dims_file"),
    )


def _generation(raw: Dict[str, Any], default_seed: int, path: pathlib.Path) -> GenerationSettings:
    width, height = raw.get("target_width"), raw.get("target_height")
    if (width is None) != (height is None):
        raise ManifestError(f"{path}: target_width and target_height go together")
    try:
        formats = raw.get("answer_formats")
        mix = {AnswerFormat(k): float(v) for k, v in formats.items()} if formats else dict(DEFAULT_FORMAT_MIX)
        return GenerationSettings(
            seed=int(raw.get("seed", default_seed)),
            records_per_annotation=int(raw.get("records_per_annotation", 1)),
            multi_turn_fraction=float(raw.get("multi_turn_fraction", DEFAULT_MULTI_TURN_FRACTION)),
            answer_formats=mix,
            target_dims=ImageDims(int(width), int(height)) if width is not None else None,
            strict_boxes=bool(raw.get("strict_boxes", True)),
        )
    except (TypeError, ValueError, AttributeError) as e:
        raise ManifestError(f"{path}: bad [generation] value: {e}") from None


def _provider(raw: Dict[str, Any], path: pathlib.Path) -> ProviderSettings:
    name = raw.get("name", "template")
    if name not in PROVIDER_NAMES:
        raise ManifestError(f"{path}: provider '{name}' (expected one of {', '.join(PROVIDER_NAMES)})")
    try:
        return ProviderSettings(
            name=name,
            model=raw.get("model"),
            temperature=float(raw.get("temperature", 0.7)),
            max_tokens=int(raw.get("max_tokens", 512)),
            max_in_flight=int(raw.get("max_in_flight", 4)),
        )
    except (TypeError, ValueError) as e:
        raise ManifestError(f"{path}: bad [provider] value: {e}") from None


def load_manifest(path: pathlib.Path, seed: Optional[int] = None) -> Manifest:
    """Parse and validate a TOML manifest; relative paths resolve against its directory"""
    path = pathlib.Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except FileNotFoundError:
        raise ManifestError(f"manifest {path} does not exist") from None
    except tomllib.TOMLDecodeError as e:
        raise ManifestError(f"{path}: invalid TOML: {e}") from None

    secrets = _find_secrets(data)
    if secrets:
        raise ManifestError(f"{path}: secrets must come from the environment, found {', '.join(secrets)}")

    base = path.parent.resolve()
    raw_datasets = data.get("datasets", [])
    if not isinstance(raw_datasets, list) or not raw_datasets:
        raise ManifestError(f"{path}: at least one [[datasets]] entry is required")
    datasets = tuple(_dataset(raw, base, path) for raw in raw_datasets)
    names = [d.name for d in datasets]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ManifestError(f"{path}: duplicate dataset names {duplicates}")

    generation = _generation(_table(data, "generation", path), int(data.get("seed", 0)), path)
    if seed is not None:
        generation = replace(generation, seed=seed)
    output = _table(data, "output", path)
    manifest = Manifest(
        path=path,
        datasets=datasets,
        generation=generation,
        provider=_provider(_table(data, "provider", path), path),
        output_dir=(base / output.get("dir", "out")).resolve(),
    )
    logger.info(f"Loaded manifest {path}: {len(datasets)} datasets, seed {manifest.seed}")
    return manifest


def check_roots(manifest: Manifest) -> None:
    """Referenced dataset roots must exist at run time"""
    for entry in manifest.datasets:
        if not entry.root.is_dir():
            raise ManifestError(f"dataset '{entry.name}': root {entry.root} does not exist")
