"""Canonical distress vocabulary, alias table and treatment lookup"""

import json
import logging
import re
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, Optional

from pavecorpus import settings
from pavecorpus.errors import UnknownLabel
from pavecorpus.models.annotation import ConditionClass, DistressClass, Severity, SourceColor

logger = logging.getLogger("pavecorpus.vocabulary")

ALIAS_TABLE_PATH = settings.DATA_DIR / "alias_table.json"

SEVERITY_VOCABULARY: FrozenSet[str] = frozenset(s.value.lower() for s in Severity)

_KEY_SEPARATORS = re.compile(r"[\s_\-]+")


def normalize_key(value: str) -> str:
    """Casefold and collapse `_`, `-` and whitespace runs into one space"""
    return _KEY_SEPARATORS.sub(" ", value.casefold()).strip()


class AliasTable:
    """Versioned mapping from dataset-specific labels to the canonical vocabulary"""

    def __init__(self, version: str, canonical, datasets: Dict[str, Dict[str, str]]):
        self.version = version
        self.canonical = tuple(canonical)
        self._canonical_keys = {normalize_key(c): c for c in self.canonical}
        self._datasets: Dict[str, Dict[str, str]] = {}
        for dataset, aliases in datasets.items():
            mapped = {}
            for alias, target in aliases.items():
                if target not in self.canonical:
                    raise ValueError(f"Alias '{alias}' in '{dataset}' targets unknown label '{target}'")
                mapped[normalize_key(alias)] = target
            self._datasets[normalize_key(dataset)] = mapped

    @classmethod
    def load(cls, path: Path = ALIAS_TABLE_PATH) -> 'AliasTable':
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
        table = cls(data["version"], data["canonical"], data.get("datasets", {}))
        logger.debug(f"Loaded alias table {table.version} from {path}")
        return table

    @property
    def datasets(self) -> list:
        return sorted(self._datasets)

    def canonicalize(self, source_label: str, source_dataset: str) -> DistressClass:
        key = normalize_key(source_label)
        aliases = self._datasets.get(normalize_key(source_dataset), {})
        canonical = aliases.get(key) or self._canonical_keys.get(key)
        if canonical is None:
            raise UnknownLabel(source_label, source_dataset)
        return DistressClass(canonical_label=canonical, source_label=source_label, source_dataset=source_dataset)

    def is_canonical(self, label: str) -> bool:
        return normalize_key(label) in self._canonical_keys


@lru_cache(maxsize=1)
def default_alias_table() -> AliasTable:
    return AliasTable.load()


def canonicalize_label(source_label: str, source_dataset: str, table: Optional[AliasTable] = None) -> DistressClass:
    return (table or default_alias_table()).canonicalize(source_label, source_dataset)


def condition_from_color(color: str) -> ConditionClass:
    return ConditionClass.from_color(SourceColor(color))


# =========================================================
# DOMAIN TEXT
# =========================================================

DISTRESS_NOTES: Dict[str, str] = {
    "longitudinal crack": "runs parallel to the pavement centreline and usually follows wheel paths or paving joints",
    "transverse crack": "runs roughly perpendicular to the centreline, typically from thermal shrinkage",
    "alligator crack": "forms interconnected polygons from repeated traffic loading and signals structural fatigue",
    "block crack": "divides the surface into roughly rectangular pieces caused by binder hardening",
    "reflective crack": "mirrors joints or cracks in the layer beneath an overlay",
    "oblique crack": "crosses the lane at an angle and often combines thermal and load effects",
    "edge crack": "develops near the pavement edge where lateral support is weak",
    "generic crack": "is a surface discontinuity that needs closer inspection to classify",
    "pothole": "is a bowl-shaped loss of surface material that exposes the base layers",
    "patch": "is an area where the original surface was replaced with new material",
    "manhole": "is a utility cover whose frame can settle relative to the surrounding surface",
    "rut": "is a longitudinal depression in the wheel path from permanent deformation",
    "repair/other": "is a previous repair or miscellaneous surface defect",
}

_TREATMENTS: Dict[str, Dict[Optional[Severity], str]] = {
    "crack": {
        None: "crack sealing",
        Severity.LOW: "routine monitoring",
        Severity.MEDIUM: "crack sealing",
        Severity.HIGH: "crack filling with surface patching",
    },
    "alligator crack": {
        None: "full-depth patching",
        Severity.LOW: "crack sealing",
        Severity.MEDIUM: "partial-depth patching",
        Severity.HIGH: "full-depth patching",
    },
    "pothole": {
        None: "pothole patching",
        Severity.LOW: "pothole patching",
        Severity.MEDIUM: "partial-depth patching",
        Severity.HIGH: "full-depth patching",
    },
    "patch": {
        None: "routine monitoring",
        Severity.LOW: "routine monitoring",
        Severity.MEDIUM: "patch edge sealing",
        Severity.HIGH: "patch replacement",
    },
    "manhole": {
        None: "frame adjustment",
        Severity.LOW: "routine monitoring",
        Severity.MEDIUM: "frame adjustment",
        Severity.HIGH: "frame reconstruction",
    },
    "rut": {
        None: "mill and overlay",
        Severity.LOW: "routine monitoring",
        Severity.MEDIUM: "rut filling",
        Severity.HIGH: "mill and overlay",
    },
    "repair/other": {
        None: "routine monitoring",
        Severity.LOW: "routine monitoring",
        Severity.MEDIUM: "spot repair",
        Severity.HIGH: "spot repair",
    },
}

NO_DISTRESS_TREATMENT = "routine monitoring"


def treatment_for(label: Optional[str], severity: Optional[Severity] = None) -> str:
    """Maintenance treatment for a canonical distress at a given severity"""
    if label is None:
        return NO_DISTRESS_TREATMENT
    row = _TREATMENTS.get(label)
    if row is None:
        row = _TREATMENTS["crack"] if label.endswith("crack") else _TREATMENTS["repair/other"]
    return row.get(severity, row[None])
