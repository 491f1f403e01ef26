import logging
from typing import Optional, Sequence

from pavecorpus.errors import ClassIndexOutOfRange
from pavecorpus.harmonize.geometry import fit_to_image, yolo_to_absolute
from pavecorpus.models.annotation import (
    BOX_EPSILON,
    ConditionClass,
    ImageDims,
    Instance,
    UnifiedAnnotation,
)
from pavecorpus.models.raw import CocoInstances, ColorClass, PciRow, RawRecord, VocBoxes, YoloBoxes
from pavecorpus.vocabulary import AliasTable, default_alias_table

logger = logging.getLogger("pavecorpus.harmonize.unify")


def unify(
    record: RawRecord,
    dims: ImageDims,
    alias_table: Optional[AliasTable] = None,
    source_dataset: str = "",
    alias_dataset: Optional[str] = None,
    class_names: Sequence[str] = (),
    strict: bool = True,
    epsilon: float = BOX_EPSILON,
) -> UnifiedAnnotation:
    """Map one format-native record into the unified schema, dispatching on payload type"""
    table = alias_table or default_alias_table()
    vocab_dataset = alias_dataset or source_dataset
    payload = record.payload
    instances = []
    condition = None
    pci = None

    if isinstance(payload, YoloBoxes):
        for class_index, box in payload.boxes:
            if class_index >= len(class_names):
                raise ClassIndexOutOfRange(f"class index {class_index} has no name", record.image_ref)
            distress = table.canonicalize(class_names[class_index], vocab_dataset)
            instances.append(Instance(yolo_to_absolute(box, dims, strict, epsilon), distress))
    elif isinstance(payload, VocBoxes):
        for label, box in payload.boxes:
            distress = table.canonicalize(label, vocab_dataset)
            instances.append(Instance(fit_to_image(box, dims, epsilon), distress))
    elif isinstance(payload, CocoInstances):
        for label, box, severity in payload.instances:
            distress = table.canonicalize(label, vocab_dataset)
            instances.append(Instance(fit_to_image(box, dims, epsilon), distress, severity))
    elif isinstance(payload, ColorClass):
        condition = ConditionClass.from_color(payload.color)
    elif isinstance(payload, PciRow):
        pci = payload.score
    else:
        raise TypeError(f"Unsupported payload {type(payload).__name__}")

    return UnifiedAnnotation(
        image_ref=record.image_ref,
        dims=dims,
        source_dataset=source_dataset,
        instances=tuple(instances),
        condition=condition,
        pci=pci,
    )
