from pathlib import Path
from typing import Optional, Union

from pavecorpus.errors import UnknownColorFolder
from pavecorpus.models.annotation import SourceColor
from pavecorpus.models.raw import ColorClass, RawRecord

_COLORS = {c.value.lower(): c for c in SourceColor}


def parse_color_folder(file_path: Union[str, Path], image_ref: Optional[str] = None) -> RawRecord:
    """Condition class is the name of the image's parent folder (Green/Blue/Yellow/Red)"""
    path = Path(file_path)
    folder = path.parent.name
    color = _COLORS.get(folder.lower())
    if color is None:
        raise UnknownColorFolder(f"folder '{folder}' is not one of {', '.join(c.value for c in SourceColor)}", str(path))
    return RawRecord(image_ref=image_ref or path.as_posix(), payload=ColorClass(color))
