"""Image-dimension sidecar index (`dims.csv`: image,width,height)

Sizes come from the CSV when present, otherwise from image headers read
with Pillow. Pixels are never decoded.
"""

import csv
import logging
from pathlib import Path
from typing import Dict, Iterable, Optional

from PIL import Image, UnidentifiedImageError

from pavecorpus.errors import MalformedLine, MissingColumn, MissingDims
from pavecorpus.models.annotation import ImageDims

logger = logging.getLogger("pavecorpus.ingest.dims")

DIMS_FILENAME = "dims.csv"
IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff")


def load_dims_csv(path: Path) -> Dict[str, ImageDims]:
    index: Dict[str, ImageDims] = {}
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        for column in ("image", "width", "height"):
            if column not in (reader.fieldnames or []):
                raise MissingColumn(f"dims index has no '{column}' column", str(path), 1)
        for row in reader:
            try:
                index[row["image"].strip()] = ImageDims(int(row["width"]), int(row["height"]))
            except (TypeError, ValueError):
                raise MalformedLine(f"bad dims row {row!r}", str(path), reader.line_num) from None
    return index


def write_dims_csv(path: Path, index: Dict[str, ImageDims]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["image", "width", "height"])
        for image_ref in sorted(index):
            dims = index[image_ref]
            writer.writerow([image_ref, dims.width, dims.height])


def read_image_dims(path: Path) -> ImageDims:
    """Size from the image header; Image.open is lazy so no pixel data is loaded"""
    try:
        with Image.open(path) as img:
            width, height = img.size
    except (FileNotFoundError, UnidentifiedImageError, OSError) as e:
        raise MissingDims(f"cannot read image header: {e}", str(path)) from None
    return ImageDims(width, height)


def build_dims_index(root: Path, image_refs: Iterable[str], dims_file: Optional[Path] = None) -> Dict[str, ImageDims]:
    """Dims for each image ref, preferring the sidecar CSV and falling back to headers"""
    sidecar = dims_file or (root / DIMS_FILENAME)
    index = load_dims_csv(sidecar) if sidecar.exists() else {}
    for ref in image_refs:
        if ref not in index and (root / ref).exists():
            index[ref] = read_image_dims(root / ref)
    return index


def lookup_dims(index: Dict[str, ImageDims], image_ref: str, path: Optional[str] = None) -> ImageDims:
    dims = index.get(image_ref)
    if dims is None:
        raise MissingDims(f"no dimensions known for '{image_ref}'", path)
    return dims
