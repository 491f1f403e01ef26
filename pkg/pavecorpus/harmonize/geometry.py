"""Coordinate conversion and rescaling between image frames"""

from dataclasses import dataclass, replace

from pavecorpus.errors import BoxOutsideImage, DegenerateBox, GeometryError
from pavecorpus.models.annotation import BOX_EPSILON, BoxAbs, BoxNorm, ImageDims, Instance, UnifiedAnnotation

RESCALE_TOLERANCE = 1e-9


@dataclass(frozen=True, slots=True)
class ScaleFactors:
    s_x: float
    s_y: float

    def __post_init__(self):
        if self.s_x <= 0 or self.s_y <= 0:
            raise GeometryError(f"Scale factors must be positive, got ({self.s_x}, {self.s_y})")

    @classmethod
    def between(cls, orig: ImageDims, target: ImageDims) -> 'ScaleFactors':
        return cls(target.width / orig.width, target.height / orig.height)


def yolo_to_absolute(box: BoxNorm, dims: ImageDims, strict: bool = True, epsilon: float = BOX_EPSILON) -> BoxAbs:
    """Normalized centre box to absolute corners, clamped to the image"""
    if not box.is_valid(epsilon):
        raise BoxOutsideImage(f"normalized box {box} overshoots the image by more than {epsilon}")
    W, H = dims.width, dims.height
    half_w = box.w * W / 2
    half_h = box.h * H / 2
    x_min = min(max(box.cx * W - half_w, 0.0), W)
    y_min = min(max(box.cy * H - half_h, 0.0), H)
    x_max = min(max(box.cx * W + half_w, 0.0), W)
    y_max = min(max(box.cy * H + half_h, 0.0), H)
    result = BoxAbs(x_min, y_min, x_max, y_max)
    if strict and result.area == 0:
        raise DegenerateBox(f"box {box} has zero area at {W}x{H}")
    return result


def absolute_to_yolo(box: BoxAbs, dims: ImageDims) -> BoxNorm:
    W, H = dims.width, dims.height
    return BoxNorm(
        cx=(box.x_min + box.x_max) / 2 / W,
        cy=(box.y_min + box.y_max) / 2 / H,
        w=(box.x_max - box.x_min) / W,
        h=(box.y_max - box.y_min) / H,
    )


def fit_to_image(box: BoxAbs, dims: ImageDims, epsilon: float = BOX_EPSILON) -> BoxAbs:
    """Clamp a box that overshoots its image by at most epsilon (relative); reject larger overshoot"""
    tolerance = epsilon * max(dims.width, dims.height)
    if not box.within(dims, tolerance):
        raise BoxOutsideImage(f"box {box.as_list()} lies outside {dims.width}x{dims.height}")
    return box.clamped(dims)


def rescale_box(box: BoxAbs, orig: ImageDims, target: ImageDims) -> BoxAbs:
    if not box.within(orig, RESCALE_TOLERANCE):
        raise BoxOutsideImage(f"box {box.as_list()} lies outside {orig.width}x{orig.height}")
    scale = ScaleFactors.between(orig, target)
    scaled = BoxAbs(box.x_min * scale.s_x, box.y_min * scale.s_y, box.x_max * scale.s_x, box.y_max * scale.s_y)
    return scaled.clamped(target)


def harmonize_annotation(annotation: UnifiedAnnotation, target: ImageDims) -> UnifiedAnnotation:
    """Rescale every instance into a common target frame"""
    if annotation.dims == target:
        return annotation
    instances = tuple(
        Instance(rescale_box(inst.box, annotation.dims, target), inst.distress, inst.severity)
        for inst in annotation.instances
    )
    return replace(annotation, dims=target, instances=instances)


def iou(a: BoxAbs, b: BoxAbs) -> float:
    """Intersection over union; 0 when disjoint or both boxes are empty"""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return min(1.0, inter / union)
