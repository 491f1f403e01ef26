import json

import pytest
from PIL import Image

from pavecorpus.errors import (
    BoxOutsideImage,
    ClassIndexOutOfRange,
    CoordOutOfRange,
    DanglingImageId,
    DuplicateImageId,
    InvertedBox,
    MalformedJson,
    MalformedLine,
    MalformedXml,
    ManifestError,
    MissingColumn,
    MissingDims,
    NegativeExtent,
    PciOutOfRange,
    UnknownColorFolder,
)
from pavecorpus.harmonize import yolo_to_absolute
from pavecorpus.ingest import (
    ScanOptions,
    parse_coco,
    parse_color_folder,
    parse_pci_csv,
    parse_voc,
    parse_yolo,
    scan_dataset,
    write_voc,
    write_yolo,
)
from pavecorpus.ingest.coco import split_severity
from pavecorpus.ingest.dims import build_dims_index, load_dims_csv, read_image_dims, write_dims_csv
from pavecorpus.models.annotation import BoxAbs, BoxNorm, ConditionClass, ImageDims, Severity, SourceColor
from pavecorpus.models.raw import CocoInstances, ColorClass, PciRow, VocBoxes, YoloBoxes

CLASSES = ["longitudinal", "transverse", "alligator", "pothole"]


def _voc(objects, width=640, height=480, filename="img.jpg"):
    body = "".join(
        f"<object><name>{name}</name><bndbox><xmin>{b[0]}</xmin><ymin>{b[1]}</ymin>"
        f"<xmax>{b[2]}</xmax><ymax>{b[3]}</ymax></bndbox></object>"
        for name, b in objects
    )
    return (
        f"<annotation><filename>{filename}</filename>"
        f"<size><width>{width}</width><height>{height}</height><depth>3</depth></size>{body}</annotation>"
    ).encode("utf-8")


def _coco(annotations, categories=None):
    return json.dumps({
        "images": [
            {"id": 1, "file_name": "b.jpg", "width": 1024, "height": 768},
            {"id": 2, "file_name": "a.jpg", "width": 1024, "height": 768},
        ],
        "annotations": annotations,
        "categories": categories or [
            {"id": 1, "name": "longitudinal_low"},
            {"id": 2, "name": "manhole"},
        ],
    }).encode("utf-8")


# =========================================================
# YOLO
# =========================================================

def test_yolo_full_image_box():
    record = parse_yolo("2 0.5 0.5 1.0 1.0", CLASSES)
    assert record.payload == YoloBoxes(((2, BoxNorm(0.5, 0.5, 1.0, 1.0)),))


def test_yolo_reads_fields_directly():
    record = parse_yolo("0 0.25 0.5 0.1 0.2\n\n", CLASSES, image_ref="x.jpg")
    assert record.image_ref == "x.jpg"
    assert record.payload.boxes == ((0, BoxNorm(0.25, 0.5, 0.1, 0.2)),)
    assert record.instance_count == 1


def test_yolo_short_line_is_malformed():
    with pytest.raises(MalformedLine) as info:
        parse_yolo("0 0.5 0.5", CLASSES, path="labels/x.txt")
    assert info.value.line == 1
    assert "labels/x.txt:1" in str(info.value)


def test_yolo_class_index_out_of_range():
    with pytest.raises(ClassIndexOutOfRange):
        parse_yolo("0 0.5 0.5 0.1 0.1\n4 0.5 0.5 0.1 0.1", CLASSES)


def test_yolo_coordinate_overshoot_rejected():
    with pytest.raises(CoordOutOfRange):
        parse_yolo("0 0.95 0.5 0.2 0.2", CLASSES)


def test_yolo_write_reproduces_parsed_boxes():
    text = "0 0.25 0.5 0.1 0.2\n3 0.7 0.3 0.05 0.4\n"
    record = parse_yolo(text, CLASSES)
    assert write_yolo(record) == text
    assert parse_yolo(write_yolo(record), CLASSES) == record


# =========================================================
# VOC
# =========================================================

def test_voc_single_object():
    record = parse_voc(_voc([("pothole", (10, 20, 110, 220))]))
    assert record.payload.dims == ImageDims(640, 480)
    assert record.payload.boxes == (("pothole", BoxAbs(10, 20, 110, 220)),)
    assert record.image_ref == "img.jpg"


def test_voc_without_objects_is_empty():
    record = parse_voc(_voc([]))
    assert record.payload.boxes == ()
    assert record.instance_count == 0


def test_voc_inverted_box():
    with pytest.raises(InvertedBox):
        parse_voc(_voc([("pothole", (110, 20, 10, 220))]))


def test_voc_missing_size():
    with pytest.raises(MissingDims):
        parse_voc(b"<annotation><object><name>x</name></object></annotation>")


def test_voc_broken_xml():
    with pytest.raises(MalformedXml):
        parse_voc(b"<annotation><size>")


def test_voc_write_then_parse_keeps_payload():
    record = parse_voc(_voc([("crack transverse", (0, 10, 300.5, 40)), ("repair", (5, 5, 50, 50))]))
    again = parse_voc(write_voc(record))
    assert again.payload == record.payload


# =========================================================
# COCO
# =========================================================

def test_coco_xywh_to_corners():
    records = parse_coco(_coco([{"id": 1, "image_id": 1, "category_id": 2, "bbox": [100, 50, 30, 40]}]))
    assert [r.image_ref for r in records] == ["a.jpg", "b.jpg"]
    b = records[1].payload
    assert isinstance(b, CocoInstances)
    assert b.instances == (("manhole", BoxAbs(100, 50, 130, 90), None),)
    assert records[0].payload.instances == ()


def test_coco_severity_suffix_split():
    records = parse_coco(_coco([{"id": 1, "image_id": 2, "category_id": 1, "bbox": [0, 0, 10, 10]}]))
    label, _box, severity = records[0].payload.instances[0]
    assert (label, severity) == ("longitudinal", Severity.LOW)


@pytest.mark.parametrize("name, expected", [
    ("alligator_high", ("alligator", Severity.HIGH)),
    ("patching_medium", ("patching", Severity.MEDIUM)),
    ("manhole", ("manhole", None)),
    ("high", ("high", None)),
])
def test_split_severity(name, expected):
    assert split_severity(name) == expected


def test_coco_negative_extent():
    with pytest.raises(NegativeExtent):
        parse_coco(_coco([{"id": 1, "image_id": 1, "category_id": 2, "bbox": [100, 50, -5, 40]}]))


def test_coco_dangling_image_id():
    with pytest.raises(DanglingImageId):
        parse_coco(_coco([{"id": 1, "image_id": 99, "category_id": 2, "bbox": [0, 0, 1, 1]}]))


# =========================================================
# COLOR FOLDERS AND PCI
# =========================================================

@pytest.mark.parametrize("path, color", [
    ("data/Green/img1.png", SourceColor.GREEN),
    ("data/red/img9.png", SourceColor.RED),
    ("data/Blue/x.jpg", SourceColor.BLUE),
])
def test_color_folder(path, color):
    assert parse_color_folder(path).payload == ColorClass(color)


def test_color_folder_outside_palette():
    with pytest.raises(UnknownColorFolder):
        parse_color_folder("data/Purple/img2.png")


def test_pci_rows():
    records = parse_pci_csv("image,pci\nimg7,62.5\nimg9,0\n")
    assert [(r.image_ref, r.payload.score.value) for r in records] == [("img7", 62.5), ("img9", 0.0)]
    assert isinstance(records[0].payload, PciRow)


def test_pci_out_of_range():
    with pytest.raises(PciOutOfRange) as info:
        parse_pci_csv("image,pci\nimg7,62.5\nimg8,105\n")
    assert info.value.line == 3


def test_pci_duplicate_id():
    with pytest.raises(DuplicateImageId):
        parse_pci_csv("image,pci\nimg7,62.5\nimg7,10\n")


def test_pci_custom_columns_and_missing_column():
    records = parse_pci_csv("file,score\nq.jpg,33\n", id_column="file", pci_column="score")
    assert records[0].payload.score.value == 33
    with pytest.raises(MissingColumn):
        parse_pci_csv("file,score\nq.jpg,33\n")


def test_pci_not_a_number():
    with pytest.raises(MalformedLine):
        parse_pci_csv("image,pci\nimg7,good\n")


# =========================================================
# NON-FINITE NUMBERS
# =========================================================

NON_FINITE = ["nan", "inf", "-inf"]


@pytest.mark.parametrize("value", NON_FINITE)
@pytest.mark.parametrize("position", range(4))
def test_yolo_rejects_non_finite(value, position):
    fields = ["0.5", "0.5", "0.1", "0.1"]
    fields[position] = value
    with pytest.raises(CoordOutOfRange) as info:
        parse_yolo("0 " + " ".join(fields), CLASSES, path="labels/n.txt")
    assert info.value.line == 1


@pytest.mark.parametrize("value", NON_FINITE)
@pytest.mark.parametrize("position", range(4))
def test_coco_rejects_non_finite(value, position):
    bbox = [100.0, 50.0, 20.0, 40.0]
    bbox[position] = float(value)
    with pytest.raises(MalformedJson):
        parse_coco(_coco([{"id": 1, "image_id": 1, "category_id": 2, "bbox": bbox}]))


@pytest.mark.parametrize("value", NON_FINITE)
@pytest.mark.parametrize("position", range(4))
def test_voc_rejects_non_finite_box(value, position):
    coords = [10, 20, 30, 40]
    coords[position] = value
    with pytest.raises(MalformedXml):
        parse_voc(_voc([("pothole", coords)]))


@pytest.mark.parametrize("value", NON_FINITE)
def test_voc_rejects_non_finite_size(value):
    with pytest.raises(MalformedXml):
        parse_voc(_voc([], width=value))


@pytest.mark.parametrize("value", NON_FINITE)
def test_pci_rejects_non_finite(value):
    with pytest.raises(PciOutOfRange) as info:
        parse_pci_csv(f"image,pci\nimg7,{value}\n")
    assert info.value.line == 2


@pytest.mark.parametrize("value", [float("nan"), float("inf"), float("-inf")])
def test_non_finite_values_fail_model_checks(value):
    assert not BoxNorm(value, 0.5, 0.1, 0.1).is_valid()
    assert not BoxNorm(0.5, 0.5, 0.1, value).is_valid()
    with pytest.raises(PciOutOfRange):
        ConditionClass.from_pci(value)
    with pytest.raises(BoxOutsideImage):
        yolo_to_absolute(BoxNorm(0.5, value, 0.1, 0.1), ImageDims(640, 480))


# =========================================================
# DIMS
# =========================================================

def test_dims_from_image_header(tmp_path):
    Image.new("RGB", (37, 21)).save(tmp_path / "tiny.png")
    assert read_image_dims(tmp_path / "tiny.png") == ImageDims(37, 21)
    assert build_dims_index(tmp_path, ["tiny.png", "absent.png"]) == {"tiny.png": ImageDims(37, 21)}


def test_dims_sidecar_wins_over_header(tmp_path):
    Image.new("RGB", (37, 21)).save(tmp_path / "tiny.png")
    write_dims_csv(tmp_path / "dims.csv", {"tiny.png": ImageDims(100, 50)})
    assert load_dims_csv(tmp_path / "dims.csv") == {"tiny.png": ImageDims(100, 50)}
    assert build_dims_index(tmp_path, ["tiny.png"])["tiny.png"] == ImageDims(100, 50)


def test_unreadable_image_header(tmp_path):
    (tmp_path / "broken.png").write_bytes(b"not an image")
    with pytest.raises(MissingDims):
        read_image_dims(tmp_path / "broken.png")


# =========================================================
# SCAN
# =========================================================

def test_scan_yolo_fixture(mini_dir):
    result = scan_dataset(mini_dir / "yolo_pid", "yolo", ScanOptions(class_names=CLASSES))
    assert [item.image_ref for item in result.items] == ["images/p1.jpg", "images/p2.jpg", "images/p3.jpg"]
    assert result.items[2].dims == ImageDims(1280, 720)
    assert result.files_read == 3
    assert result.instance_count == 5


def test_scan_yolo_requires_class_names(mini_dir):
    with pytest.raises(ManifestError):
        scan_dataset(mini_dir / "yolo_pid", "yolo")


def test_scan_voc_fixture(mini_dir):
    result = scan_dataset(mini_dir / "voc_uapd", "voc")
    assert len(result.items) == 3
    assert all(isinstance(item.record.payload, VocBoxes) for item in result.items)
    assert {item.dims for item in result.items} == {ImageDims(800, 600)}


def test_scan_coco_fixture(mini_dir):
    result = scan_dataset(mini_dir / "coco_dsps23", "coco")
    assert len(result.items) == 3
    assert result.files_read == 1


def test_scan_color_fixture(mini_dir):
    result = scan_dataset(mini_dir / "color_pcier", "color_folder")
    colors = {item.image_ref: item.record.payload.color for item in result.items}
    assert colors == {
        "Blue/b1.png": SourceColor.BLUE,
        "Green/g1.png": SourceColor.GREEN,
        "Red/r1.png": SourceColor.RED,
    }


def test_scan_pci_fixture(mini_dir):
    result = scan_dataset(mini_dir / "pci_dsps24", "pci_csv")
    scores = [item.record.payload.score.value for item in result.items]
    assert scores == [85.0, 41.0, 12.5]
    assert result.items[0].dims == ImageDims(1920, 1080)


def test_scan_unknown_format_and_missing_root(mini_dir, tmp_path):
    with pytest.raises(ManifestError):
        scan_dataset(mini_dir / "voc_uapd", "kitti")
    with pytest.raises(ManifestError):
        scan_dataset(tmp_path / "nowhere", "voc")


def test_scan_lenient_skips_bad_file(tmp_path):
    (tmp_path / "good.xml").write_bytes(_voc([("pothole", (1, 1, 5, 5))], filename="good.jpg"))
    (tmp_path / "bad.xml").write_bytes(_voc([("pothole", (9, 1, 5, 5))], filename="bad.jpg"))

    with pytest.raises(InvertedBox):
        scan_dataset(tmp_path, "voc")

    result = scan_dataset(tmp_path, "voc", ScanOptions(lenient=True))
    assert [item.image_ref for item in result.items] == ["good.jpg"]
    assert len(result.skipped) == 1
    assert result.skipped[0][0].endswith("bad.xml")
