from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pavecorpus.errors import GeometryError, PciOutOfRange, UnknownSeverity

BOX_EPSILON = 1e-6


@dataclass(frozen=True, slots=True)
class ImageDims:
    """Image size in pixels"""

    width: int
    height: int

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise GeometryError(f"Image dims must be positive, got {self.width}x{self.height}")

    def to_list(self) -> List[int]:
        return [self.width, self.height]

    @classmethod
    def from_list(cls, data: List[int]) -> 'ImageDims':
        return cls(width=int(data[0]), height=int(data[1]))


@dataclass(frozen=True, slots=True)
class BoxNorm:
    """YOLO-style box: normalized centre plus relative width/height"""

    cx: float
    cy: float
    w: float
    h: float

    def is_valid(self, epsilon: float = BOX_EPSILON) -> bool:
        values = (self.cx, self.cy, self.w, self.h)
        if not all(0.0 <= v <= 1.0 for v in values):
            return False
        if self.cx - self.w / 2 < -epsilon or self.cx + self.w / 2 > 1 + epsilon:
            return False
        if self.cy - self.h / 2 < -epsilon or self.cy + self.h / 2 > 1 + epsilon:
            return False
        return True


def round_half_up(value: float) -> int:
    return int(Decimal(repr(value)).quantize(Decimal("1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True, slots=True)
class BoxAbs:
    """Corner-form box in absolute pixels, (x_min, y_min) is top-left"""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise GeometryError(f"Inverted box {self.as_list()}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def as_list(self) -> List[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    def within(self, dims: ImageDims, tolerance: float = 0.0) -> bool:
        return (
            self.x_min >= -tolerance
            and self.y_min >= -tolerance
            and self.x_max <= dims.width + tolerance
            and self.y_max <= dims.height + tolerance
        )

    def clamped(self, dims: ImageDims) -> 'BoxAbs':
        return BoxAbs(
            min(max(self.x_min, 0.0), dims.width),
            min(max(self.y_min, 0.0), dims.height),
            min(max(self.x_max, 0.0), dims.width),
            min(max(self.y_max, 0.0), dims.height),
        )

    def rendered(self, dims: Optional[ImageDims] = None) -> List[int]:
        """Integer [x1, y1, x2, y2] as quoted in instruction answers"""
        coords = [round_half_up(v) for v in self.as_list()]
        if dims is not None:
            coords[0] = min(max(coords[0], 0), dims.width)
            coords[2] = min(max(coords[2], 0), dims.width)
            coords[1] = min(max(coords[1], 0), dims.height)
            coords[3] = min(max(coords[3], 0), dims.height)
        return coords

    @classmethod
    def from_list(cls, data: List[float]) -> 'BoxAbs':
        return cls(*(float(v) for v in data))


class Severity(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @classmethod
    def parse(cls, value: str) -> 'Severity':
        key = value.strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise UnknownSeverity(value)


class ConditionLabel(str, Enum):
    GOOD = "Good"
    FAIR = "Fair"
    POOR = "Poor"
    FAILED = "Failed"


class SourceColor(str, Enum):
    GREEN = "Green"
    BLUE = "Blue"
    YELLOW = "Yellow"
    RED = "Red"


# Inclusive integer PCI intervals per condition class; together they cover 0..100.
PCI_RANGES: Dict[ConditionLabel, Tuple[int, int]] = {
    ConditionLabel.GOOD: (70, 100),
    ConditionLabel.FAIR: (50, 69),
    ConditionLabel.POOR: (25, 49),
    ConditionLabel.FAILED: (0, 24),
}

COLOR_TO_CONDITION: Dict[SourceColor, ConditionLabel] = {
    SourceColor.GREEN: ConditionLabel.GOOD,
    SourceColor.BLUE: ConditionLabel.FAIR,
    SourceColor.YELLOW: ConditionLabel.POOR,
    SourceColor.RED: ConditionLabel.FAILED,
}


@dataclass(frozen=True, slots=True)
class ConditionClass:
    label: ConditionLabel
    source_color: Optional[SourceColor] = None

    @property
    def pci_range(self) -> Tuple[int, int]:
        return PCI_RANGES[self.label]

    @classmethod
    def from_color(cls, color: SourceColor) -> 'ConditionClass':
        return cls(label=COLOR_TO_CONDITION[color], source_color=color)

    @classmethod
    def from_pci(cls, score: float) -> 'ConditionClass':
        if not 0 <= score <= 100:
            raise PciOutOfRange(f"PCI {score} outside [0, 100]")
        # Real-valued scores between integer bands (e.g. 69.5) fall to the lower class.
        for label, (low, _high) in PCI_RANGES.items():
            if score >= low:
                return cls(label=label)
        return cls(label=ConditionLabel.FAILED)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label.value,
            "source_color": self.source_color.value if self.source_color else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConditionClass':
        color = data.get("source_color")
        return cls(
            label=ConditionLabel(data["label"]),
            source_color=SourceColor(color) if color else None,
        )


@dataclass(frozen=True, slots=True)
class PciScore:
    value: float

    def __post_init__(self):
        if not 0.0 <= float(self.value) <= 100.0:
            raise PciOutOfRange(f"PCI {self.value} outside [0, 100]")

    def display(self) -> str:
        return f"{self.value:g}"


@dataclass(frozen=True, slots=True)
class DistressClass:
    canonical_label: str
    source_label: str
    source_dataset: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "canonical_label": self.canonical_label,
            "source_label": self.source_label,
            "source_dataset": self.source_dataset,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DistressClass':
        return cls(data["canonical_label"], data["source_label"], data["source_dataset"])


@dataclass(frozen=True, slots=True)
class Instance:
    box: BoxAbs
    distress: DistressClass
    severity: Optional[Severity] = None

    @property
    def label(self) -> str:
        return self.distress.canonical_label

    def to_dict(self) -> Dict[str, Any]:
        return {
            "box": self.box.as_list(),
            "distress": self.distress.to_dict(),
            "severity": self.severity.value if self.severity else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Instance':
        severity = data.get("severity")
        return cls(
            box=BoxAbs.from_list(data["box"]),
            distress=DistressClass.from_dict(data["distress"]),
            severity=Severity.parse(severity) if severity else None,
        )


@dataclass(frozen=True, slots=True)
class UnifiedAnnotation:
    """One image's harmonized labels: spatial boxes, distress classes, condition data"""

    image_ref: str
    dims: ImageDims
    source_dataset: str
    instances: Tuple[Instance, ...] = field(default_factory=tuple)
    condition: Optional[ConditionClass] = None
    pci: Optional[PciScore] = None

    @property
    def has_severity(self) -> bool:
        return any(inst.severity is not None for inst in self.instances)

    @property
    def effective_condition(self) -> Optional[ConditionClass]:
        """Declared condition, else the class implied by the PCI score"""
        if self.condition is not None:
            return self.condition
        if self.pci is not None:
            return ConditionClass.from_pci(self.pci.value)
        return None

    @property
    def labels(self) -> List[str]:
        return [inst.label for inst in self.instances]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "image_ref": self.image_ref,
            "dims": self.dims.to_list(),
            "source_dataset": self.source_dataset,
            "instances": [inst.to_dict() for inst in self.instances],
            "condition": self.condition.to_dict() if self.condition else None,
            "pci": self.pci.value if self.pci else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UnifiedAnnotation':
        condition = data.get("condition")
        pci = data.get("pci")
        return cls(
            image_ref=data["image_ref"],
            dims=ImageDims.from_list(data["dims"]),
            source_dataset=data["source_dataset"],
            instances=tuple(Instance.from_dict(i) for i in data.get("instances", [])),
            condition=ConditionClass.from_dict(condition) if condition else None,
            pci=PciScore(pci) if pci is not None else None,
        )
