"""COCO detection JSON: images, annotations with xywh boxes, categories"""

import json
import logging
import math
from typing import Dict, List, Optional, Tuple

from pavecorpus.errors import DanglingImageId, MalformedJson, NegativeExtent
from pavecorpus.models.annotation import BoxAbs, ImageDims, Severity
from pavecorpus.models.raw import CocoInstances, RawRecord
from pavecorpus.vocabulary import normalize_key

logger = logging.getLogger("pavecorpus.ingest.coco")

_SEVERITY_SUFFIXES = {s.value.lower(): s for s in Severity}


def split_severity(category_name: str) -> Tuple[str, Optional[Severity]]:
    """'alligator_high' -> ('alligator', High); names without a suffix keep severity None"""
    key = normalize_key(category_name)
    head, _, tail = key.rpartition(" ")
    if head and tail in _SEVERITY_SUFFIXES:
        return head, _SEVERITY_SUFFIXES[tail]
    return category_name, None


def parse_coco(json_document: bytes, path: Optional[str] = None) -> List[RawRecord]:
    try:
        doc = json.loads(json_document)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MalformedJson(f"invalid JSON: {e}", path) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("images"), list):
        raise MalformedJson("document has no 'images' list", path)

    categories: Dict[int, str] = {}
    for cat in doc.get("categories", []):
        try:
            categories[int(cat["id"])] = str(cat["name"])
        except (KeyError, TypeError, ValueError):
            raise MalformedJson(f"bad category entry {cat!r}", path) from None

    images: Dict[int, Tuple[str, ImageDims]] = {}
    for img in doc["images"]:
        try:
            image_id, file_name = int(img["id"]), str(img["file_name"])
            width, height = int(img["width"]), int(img["height"])
        except (KeyError, TypeError, ValueError):
            raise MalformedJson(f"bad image entry {img!r}", path) from None
        if width < 1 or height < 1:
            raise MalformedJson(f"image {image_id} has non-positive size", path)
        images[image_id] = (file_name, ImageDims(width, height))

    instances: Dict[int, list] = {image_id: [] for image_id in images}
    for ann in doc.get("annotations", []):
        try:
            image_id = int(ann["image_id"])
            x, y, w, h = (float(v) for v in ann["bbox"])
            category_name = categories[int(ann["category_id"])]
        except KeyError as e:
            raise MalformedJson(f"annotation {ann.get('id')} references missing key {e}", path) from None
        except (TypeError, ValueError):
            raise MalformedJson(f"bad annotation entry {ann!r}", path) from None
        if image_id not in images:
            raise DanglingImageId(f"annotation {ann.get('id')} points at unknown image {image_id}", path)
        if not all(math.isfinite(v) for v in (x, y, w, h)):
            raise MalformedJson(f"annotation {ann.get('id')} has non-finite bbox {ann['bbox']!r}", path)
        if w < 0 or h < 0:
            raise NegativeExtent(f"annotation {ann.get('id')} has bbox extent {w}x{h}", path)
        label, severity = split_severity(category_name)
        instances[image_id].append((label, BoxAbs(x, y, x + w, y + h), severity))

    records = [
        RawRecord(image_ref=file_name, payload=CocoInstances(dims=dims, instances=tuple(instances[image_id])))
        for image_id, (file_name, dims) in images.items()
    ]
    records.sort(key=lambda r: r.image_ref)
    logger.debug(f"Parsed {len(records)} COCO images from {path or '<memory>'}")
    return records
