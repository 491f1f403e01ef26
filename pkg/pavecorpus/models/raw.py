"""Format-native records produced by the ingest parsers"""

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from pavecorpus.models.annotation import BoxAbs, BoxNorm, ImageDims, PciScore, Severity, SourceColor


@dataclass(frozen=True, slots=True)
class YoloBoxes:
    boxes: Tuple[Tuple[int, BoxNorm], ...] = field(default_factory=tuple)


@dataclass(frozen=True, slots=True)
class VocBoxes:
    dims: ImageDims
    boxes: Tuple[Tuple[str, BoxAbs], ...] = field(default_factory=tuple)
    filename: Optional[str] = None


@dataclass(frozen=True, slots=True)
class CocoInstances:
    dims: ImageDims
    instances: Tuple[Tuple[str, BoxAbs, Optional[Severity]], ...] = field(default_factory=tuple)


@dataclass(frozen=True, slots=True)
class ColorClass:
    color: SourceColor


@dataclass(frozen=True, slots=True)
class PciRow:
    score: PciScore


Payload = Union[YoloBoxes, VocBoxes, CocoInstances, ColorClass, PciRow]

FORMAT_PAYLOADS = {
    "yolo": YoloBoxes,
    "voc": VocBoxes,
    "coco": CocoInstances,
    "color_folder": ColorClass,
    "pci_csv": PciRow,
}


@dataclass(frozen=True, slots=True)
class RawRecord:
    image_ref: str
    payload: Payload

    @property
    def instance_count(self) -> int:
        if isinstance(self.payload, YoloBoxes | VocBoxes):
            return len(self.payload.boxes)
        if isinstance(self.payload, CocoInstances):
            return len(self.payload.instances)
        return 0
