import pathlib
import shutil
from typing import Optional, Sequence, Tuple

import pytest

from pavecorpus.models.annotation import (
    BoxAbs,
    ConditionClass,
    DistressClass,
    ImageDims,
    Instance,
    PciScore,
    Severity,
    UnifiedAnnotation,
)

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
MINI = FIXTURES / "mini"


def make_instance(label: str, box: Sequence[float], severity: Optional[str] = None, dataset: str = "test") -> Instance:
    return Instance(
        box=BoxAbs(*box),
        distress=DistressClass(canonical_label=label, source_label=label, source_dataset=dataset),
        severity=Severity.parse(severity) if severity else None,
    )


def make_annotation(
    image_ref: str = "test/a.jpg",
    dims: Tuple[int, int] = (640, 480),
    instances: Sequence[Instance] = (),
    condition: Optional[ConditionClass] = None,
    pci: Optional[float] = None,
    source_dataset: str = "test",
) -> UnifiedAnnotation:
    return UnifiedAnnotation(
        image_ref=image_ref,
        dims=ImageDims(*dims),
        source_dataset=source_dataset,
        instances=tuple(instances),
        condition=condition,
        pci=PciScore(pci) if pci is not None else None,
    )


@pytest.fixture
def mini_dir() -> pathlib.Path:
    return MINI


@pytest.fixture
def mini_manifest(tmp_path) -> pathlib.Path:
    """A private copy of the mini fixtures so runs can write next to the manifest"""
    target = tmp_path / "mini"
    shutil.copytree(MINI, target)
    return target / "manifest.toml"


@pytest.fixture
def severity_annotation() -> UnifiedAnnotation:
    return make_annotation(
        image_ref="dsps23/d1.jpg",
        dims=(1024, 768),
        instances=[
            make_instance("alligator crack", (100, 100, 400, 300), "High"),
            make_instance("transverse crack", (500, 400, 900, 430), "Low"),
        ],
        source_dataset="dsps23",
    )


@pytest.fixture
def pci_annotation() -> UnifiedAnnotation:
    return make_annotation(image_ref="dsps24/s2.jpg", dims=(1920, 1080), pci=41.0, source_dataset="dsps24")


@pytest.fixture
def plain_annotation() -> UnifiedAnnotation:
    return make_annotation(
        image_ref="pid/images/p1.jpg",
        instances=[
            make_instance("longitudinal crack", (256, 96, 384, 384)),
            make_instance("pothole", (128, 96, 192, 144)),
        ],
        source_dataset="pid",
    )
