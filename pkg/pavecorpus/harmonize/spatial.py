"""Pairwise spatial relations between the instances of one image"""

import math
from dataclasses import dataclass
from typing import List, Tuple

from pavecorpus.errors import EmptyAnnotation
from pavecorpus.harmonize.geometry import iou
from pavecorpus.models.annotation import UnifiedAnnotation

# Counter-clockwise from east, matching atan2 with the image y-axis flipped.
SECTORS = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")
SELF = "Self"
COINCIDENT = "C"

OPPOSITE = {s: SECTORS[(i + 4) % 8] for i, s in enumerate(SECTORS)}
OPPOSITE[SELF] = SELF
OPPOSITE[COINCIDENT] = COINCIDENT

DIRECTION_WORDS = {
    "E": "east", "NE": "north-east", "N": "north", "NW": "north-west",
    "W": "west", "SW": "south-west", "S": "south", "SE": "south-east",
    COINCIDENT: "centred on", SELF: "itself",
}


@dataclass(frozen=True, slots=True)
class RelationCell:
    center_distance: float
    overlap_iou: float
    direction: str


@dataclass(frozen=True, slots=True)
class SpatialRelationMatrix:
    n: int
    entries: Tuple[Tuple[RelationCell, ...], ...]

    def cell(self, i: int, j: int) -> RelationCell:
        return self.entries[i][j]


def compass_sector(dx: float, dy: float) -> str:
    """Sector of an image-space vector (y grows downward); boundaries go to the next sector counter-clockwise"""
    angle = math.degrees(math.atan2(-dy, dx))
    return SECTORS[math.floor((angle + 22.5) / 45) % 8]


def spatial_relations(annotation: UnifiedAnnotation) -> SpatialRelationMatrix:
    instances = annotation.instances
    n = len(instances)
    if n == 0:
        raise EmptyAnnotation(f"'{annotation.image_ref}' has no instances")

    grid: List[List[RelationCell]] = [[None] * n for _ in range(n)]
    for i in range(n):
        grid[i][i] = RelationCell(0.0, 1.0, SELF)
        ci = instances[i].box.center
        for j in range(i + 1, n):
            cj = instances[j].box.center
            dx, dy = cj[0] - ci[0], cj[1] - ci[1]
            distance = math.hypot(dx, dy)
            overlap = iou(instances[i].box, instances[j].box)
            direction = COINCIDENT if dx == 0 and dy == 0 else compass_sector(dx, dy)
            grid[i][j] = RelationCell(distance, overlap, direction)
            grid[j][i] = RelationCell(distance, overlap, OPPOSITE[direction])
    return SpatialRelationMatrix(n=n, entries=tuple(tuple(row) for row in grid))
