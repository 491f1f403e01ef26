"""Pascal VOC XML annotations (absolute corner boxes, dims in <size>)"""

import math
import xml.etree.ElementTree as ET
from typing import Optional

from pavecorpus.errors import InvertedBox, MalformedXml, MissingDims
from pavecorpus.models.annotation import BoxAbs, ImageDims
from pavecorpus.models.raw import RawRecord, VocBoxes


def _number(node: Optional[ET.Element], tag: str, path: Optional[str]) -> float:
    child = node.find(tag) if node is not None else None
    if child is None or child.text is None:
        raise MalformedXml(f"missing <{tag}>", path)
    try:
        value = float(child.text.strip())
    except ValueError:
        raise MalformedXml(f"<{tag}> is not numeric: '{child.text}'", path) from None
    if not math.isfinite(value):
        raise MalformedXml(f"<{tag}> is not finite: '{child.text}'", path)
    return value


def parse_voc(xml_document: bytes, path: Optional[str] = None, image_ref: Optional[str] = None) -> RawRecord:
    try:
        root = ET.fromstring(xml_document)
    except ET.ParseError as e:
        raise MalformedXml(f"invalid XML: {e}", path) from None

    size = root.find("size")
    if size is None or size.find("width") is None or size.find("height") is None:
        raise MissingDims("annotation has no <size> width/height", path)
    width, height = int(_number(size, "width", path)), int(_number(size, "height", path))
    if width < 1 or height < 1:
        raise MissingDims(f"image size {width}x{height} is not positive", path)
    dims = ImageDims(width, height)

    filename_node = root.find("filename")
    filename = filename_node.text.strip() if filename_node is not None and filename_node.text else None

    boxes = []
    for obj in root.findall("object"):
        name_node = obj.find("name")
        if name_node is None or not (name_node.text or "").strip():
            raise MalformedXml("object without <name>", path)
        bndbox = obj.find("bndbox")
        if bndbox is None:
            raise MalformedXml(f"object '{name_node.text}' has no <bndbox>", path)
        coords = [_number(bndbox, tag, path) for tag in ("xmin", "ymin", "xmax", "ymax")]
        # Stored pixel integers are kept as-is; no 1-based to 0-based shift.
        if coords[0] > coords[2] or coords[1] > coords[3]:
            raise InvertedBox(f"bndbox {coords} has min > max", path)
        boxes.append((name_node.text.strip(), BoxAbs(*coords)))

    ref = image_ref or filename or ""
    return RawRecord(image_ref=ref, payload=VocBoxes(dims=dims, boxes=tuple(boxes), filename=filename))


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(value)


def write_voc(record: RawRecord) -> bytes:
    """Serialize a VocBoxes record to VOC XML"""
    payload = record.payload
    if not isinstance(payload, VocBoxes):
        raise TypeError("write_voc expects a VocBoxes payload")
    root = ET.Element("annotation")
    if payload.filename:
        ET.SubElement(root, "filename").text = payload.filename
    size = ET.SubElement(root, "size")
    ET.SubElement(size, "width").text = str(payload.dims.width)
    ET.SubElement(size, "height").text = str(payload.dims.height)
    ET.SubElement(size, "depth").text = "3"
    for label, box in payload.boxes:
        obj = ET.SubElement(root, "object")
        ET.SubElement(obj, "name").text = label
        bndbox = ET.SubElement(obj, "bndbox")
        for tag, value in zip(("xmin", "ymin", "xmax", "ymax"), box.as_list()):
            ET.SubElement(bndbox, tag).text = _fmt(value)
    return ET.tostring(root, encoding="utf-8")
