import random

import pytest

from conftest import make_annotation, make_instance
from pavecorpus.errors import BoxOutsideImage, DegenerateBox, EmptyAnnotation, UnknownLabel
from pavecorpus.harmonize import (
    absolute_to_yolo,
    harmonize_annotation,
    iou,
    rescale_box,
    spatial_relations,
    unify,
    yolo_to_absolute,
)
from pavecorpus.harmonize.spatial import compass_sector
from pavecorpus.models.annotation import (
    BoxAbs,
    BoxNorm,
    ConditionLabel,
    ImageDims,
    PciScore,
    SourceColor,
)
from pavecorpus.models.raw import ColorClass, PciRow, RawRecord, VocBoxes, YoloBoxes

CLASSES = ("longitudinal", "transverse", "alligator", "pothole")


def _close(a: BoxAbs, b: BoxAbs, tol: float = 1e-9) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(a.as_list(), b.as_list()))


# =========================================================
# CONVERSION
# =========================================================

def test_full_image_box_to_absolute():
    assert yolo_to_absolute(BoxNorm(0.5, 0.5, 1.0, 1.0), ImageDims(640, 480)) == BoxAbs(0, 0, 640, 480)


def test_yolo_to_absolute_arithmetic():
    box = yolo_to_absolute(BoxNorm(0.25, 0.5, 0.1, 0.2), ImageDims(1000, 500))
    assert _close(box, BoxAbs(200, 200, 300, 300))


def test_zero_area_is_degenerate_when_strict():
    with pytest.raises(DegenerateBox):
        yolo_to_absolute(BoxNorm(0.5, 0.5, 0.0, 0.0), ImageDims(640, 480))
    assert yolo_to_absolute(BoxNorm(0.5, 0.5, 0.0, 0.0), ImageDims(640, 480), strict=False).area == 0


def test_overshooting_box_rejected():
    with pytest.raises(BoxOutsideImage):
        yolo_to_absolute(BoxNorm(0.95, 0.5, 0.2, 0.2), ImageDims(640, 480))


def test_absolute_normalized_absolute_round_trip():
    rng = random.Random(7)
    for _ in range(1000):
        dims = ImageDims(rng.randint(1, 4000), rng.randint(1, 4000))
        w, h = rng.uniform(0.001, 1.0), rng.uniform(0.001, 1.0)
        norm = BoxNorm(rng.uniform(w / 2, 1 - w / 2), rng.uniform(h / 2, 1 - h / 2), w, h)
        first = yolo_to_absolute(norm, dims)
        second = yolo_to_absolute(absolute_to_yolo(first, dims), dims)
        assert _close(first, second, 1e-9 * max(dims.width, dims.height, 1))


# =========================================================
# RESCALING
# =========================================================

def test_rescale_halves_coordinates():
    box = rescale_box(BoxAbs(100, 100, 200, 200), ImageDims(1000, 1000), ImageDims(500, 500))
    assert box == BoxAbs(50, 50, 100, 100)


def test_rescale_identity():
    box = BoxAbs(12.5, 3, 40, 77)
    assert rescale_box(box, ImageDims(640, 480), ImageDims(640, 480)) == box


def test_rescale_rejects_box_outside_image():
    with pytest.raises(BoxOutsideImage):
        rescale_box(BoxAbs(900, 0, 1100, 100), ImageDims(1000, 1000), ImageDims(500, 500))


def test_rescale_composes():
    rng = random.Random(3)
    for _ in range(200):
        a = ImageDims(rng.randint(10, 3000), rng.randint(10, 3000))
        b = ImageDims(rng.randint(10, 3000), rng.randint(10, 3000))
        c = ImageDims(rng.randint(10, 3000), rng.randint(10, 3000))
        x1, x2 = sorted(rng.uniform(0, a.width) for _ in range(2))
        y1, y2 = sorted(rng.uniform(0, a.height) for _ in range(2))
        box = BoxAbs(x1, y1, x2, y2)
        via_b = rescale_box(rescale_box(box, a, b), b, c)
        direct = rescale_box(box, a, c)
        assert _close(via_b, direct, 1e-9 * max(c.width, c.height))


def test_harmonize_annotation_moves_every_instance():
    annotation = make_annotation(
        dims=(1000, 1000),
        instances=[make_instance("pothole", (100, 100, 200, 200)), make_instance("patch", (0, 0, 1000, 500))],
    )
    result = harmonize_annotation(annotation, ImageDims(500, 500))
    assert result.dims == ImageDims(500, 500)
    assert [i.box for i in result.instances] == [BoxAbs(50, 50, 100, 100), BoxAbs(0, 0, 500, 250)]
    assert harmonize_annotation(result, ImageDims(500, 500)) is result


def test_iou():
    assert iou(BoxAbs(0, 0, 10, 10), BoxAbs(0, 0, 10, 10)) == 1.0
    assert iou(BoxAbs(0, 0, 10, 10), BoxAbs(20, 0, 30, 10)) == 0.0
    assert iou(BoxAbs(0, 0, 10, 10), BoxAbs(5, 0, 15, 10)) == pytest.approx(1 / 3)


# =========================================================
# UNIFY
# =========================================================

def test_unify_yolo_keeps_every_box():
    record = RawRecord("p.jpg", YoloBoxes(((0, BoxNorm(0.5, 0.5, 0.2, 0.6)), (3, BoxNorm(0.25, 0.25, 0.1, 0.1)))))
    annotation = unify(record, ImageDims(640, 480), source_dataset="pid", class_names=CLASSES)
    assert annotation.labels == ["longitudinal crack", "pothole"]
    assert annotation.instances[0].distress.source_label == "longitudinal"
    assert annotation.condition is None
    assert annotation.pci is None


def test_unify_color_gives_condition_only():
    annotation = unify(RawRecord("b.png", ColorClass(SourceColor.BLUE)), ImageDims(512, 512), source_dataset="pcier")
    assert annotation.instances == ()
    assert annotation.condition.label is ConditionLabel.FAIR
    assert annotation.condition.source_color is SourceColor.BLUE


def test_unify_pci_carries_score():
    annotation = unify(RawRecord("s.jpg", PciRow(PciScore(41))), ImageDims(1920, 1080), source_dataset="dsps24")
    assert annotation.pci.value == 41
    assert annotation.instances == ()
    assert annotation.effective_condition.label is ConditionLabel.POOR


def test_unify_uses_alias_dataset():
    record = RawRecord("u.jpg", VocBoxes(ImageDims(800, 600), (("crack oblique", BoxAbs(1, 1, 9, 9)),)))
    with pytest.raises(UnknownLabel):
        unify(record, ImageDims(800, 600), source_dataset="mine")
    annotation = unify(record, ImageDims(800, 600), source_dataset="mine", alias_dataset="uapd")
    assert annotation.labels == ["oblique crack"]
    assert annotation.source_dataset == "mine"


# =========================================================
# SPATIAL
# =========================================================

def test_single_instance_relation_is_self():
    matrix = spatial_relations(make_annotation(instances=[make_instance("pothole", (0, 0, 10, 10))]))
    assert matrix.n == 1
    cell = matrix.cell(0, 0)
    assert (cell.center_distance, cell.overlap_iou, cell.direction) == (0.0, 1.0, "Self")


def test_coincident_boxes():
    matrix = spatial_relations(make_annotation(instances=[
        make_instance("pothole", (0, 0, 10, 10)),
        make_instance("patch", (0, 0, 10, 10)),
    ]))
    assert matrix.cell(0, 1).overlap_iou == 1.0
    assert matrix.cell(0, 1).center_distance == 0.0


def test_side_by_side_boxes():
    matrix = spatial_relations(make_annotation(instances=[
        make_instance("pothole", (0, 0, 10, 10)),
        make_instance("patch", (20, 0, 30, 10)),
    ]))
    assert matrix.cell(0, 1).center_distance == 20.0
    assert matrix.cell(0, 1).overlap_iou == 0.0
    assert matrix.cell(0, 1).direction == "E"
    assert matrix.cell(1, 0).direction == "W"


def test_relations_are_symmetric(plain_annotation):
    matrix = spatial_relations(plain_annotation)
    forward, backward = matrix.cell(0, 1), matrix.cell(1, 0)
    assert forward.center_distance == backward.center_distance
    assert forward.overlap_iou == backward.overlap_iou


@pytest.mark.parametrize("dx, dy, sector", [
    (1, 0, "E"), (0, -1, "N"), (-1, 0, "W"), (0, 1, "S"), (1, -1, "NE"), (-1, 1, "SW"),
])
def test_compass_sector_uses_image_axes(dx, dy, sector):
    assert compass_sector(dx, dy) == sector


def test_no_instances_has_no_relations(pci_annotation):
    with pytest.raises(EmptyAnnotation):
        spatial_relations(pci_annotation)
