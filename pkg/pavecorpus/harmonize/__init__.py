from pavecorpus.harmonize.geometry import (
    ScaleFactors,
    absolute_to_yolo,
    harmonize_annotation,
    iou,
    rescale_box,
    yolo_to_absolute,
)
from pavecorpus.harmonize.spatial import SpatialRelationMatrix, spatial_relations
from pavecorpus.harmonize.unify import unify

__all__ = [
    "ScaleFactors",
    "SpatialRelationMatrix",
    "absolute_to_yolo",
    "harmonize_annotation",
    "iou",
    "rescale_box",
    "spatial_relations",
    "unify",
    "yolo_to_absolute",
]
