"""YOLO label files: one `class cx cy w h` line per box, coordinates normalized"""

from typing import Iterable, List, Optional, Sequence, Union

from pavecorpus.errors import ClassIndexOutOfRange, CoordOutOfRange, MalformedLine
from pavecorpus.models.annotation import BOX_EPSILON, BoxNorm
from pavecorpus.models.raw import RawRecord, YoloBoxes


def parse_yolo(
    label_file: Union[str, Iterable[str]],
    class_names: Sequence[str],
    image_ref: str = "",
    path: Optional[str] = None,
    epsilon: float = BOX_EPSILON,
) -> RawRecord:
    lines = label_file.splitlines() if isinstance(label_file, str) else list(label_file)
    boxes = []
    for line_no, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise MalformedLine(f"expected 5 fields, got {len(fields)}", path, line_no)
        try:
            class_index = int(fields[0])
            cx, cy, w, h = (float(v) for v in fields[1:])
        except ValueError:
            raise MalformedLine(f"non-numeric field in '{line.strip()}'", path, line_no) from None

        if class_index < 0 or class_index >= len(class_names):
            raise ClassIndexOutOfRange(
                f"class index {class_index} not in 0..{len(class_names) - 1}", path, line_no
            )
        box = BoxNorm(cx, cy, w, h)
        if not box.is_valid(epsilon):
            raise CoordOutOfRange(f"box {cx} {cy} {w} {h} exceeds [0,1]", path, line_no)
        boxes.append((class_index, box))

    return RawRecord(image_ref=image_ref, payload=YoloBoxes(tuple(boxes)))


def write_yolo(record: RawRecord) -> str:
    """Serialize a YoloBoxes record back to label-file text"""
    if not isinstance(record.payload, YoloBoxes):
        raise TypeError("write_yolo expects a YoloBoxes payload")
    lines: List[str] = [
        f"{idx} {box.cx!r} {box.cy!r} {box.w!r} {box.h!r}" for idx, box in record.payload.boxes
    ]
    return "\n".join(lines) + ("\n" if lines else "")
