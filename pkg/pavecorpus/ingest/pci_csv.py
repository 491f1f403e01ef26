"""CSV files pairing image ids with numeric PCI scores"""

import csv
import io
from typing import List, Optional

from pavecorpus.errors import DuplicateImageId, MalformedLine, MissingColumn, PciOutOfRange
from pavecorpus.models.annotation import PciScore
from pavecorpus.models.raw import PciRow, RawRecord


def parse_pci_csv(
    csv_document: str,
    id_column: str = "image",
    pci_column: str = "pci",
    path: Optional[str] = None,
) -> List[RawRecord]:
    reader = csv.DictReader(io.StringIO(csv_document))
    header = [h.strip() for h in (reader.fieldnames or [])]
    for column in (id_column, pci_column):
        if column not in header:
            raise MissingColumn(f"header has no '{column}' column (found {header})", path, 1)
    reader.fieldnames = header

    records: List[RawRecord] = []
    seen = set()
    for row in reader:
        line_no = reader.line_num
        image_id = (row.get(id_column) or "").strip()
        raw_value = (row.get(pci_column) or "").strip()
        if not image_id:
            raise MalformedLine("empty image id", path, line_no)
        try:
            value = float(raw_value)
        except ValueError:
            raise MalformedLine(f"PCI '{raw_value}' is not a number", path, line_no) from None
        if not 0.0 <= value <= 100.0:
            raise PciOutOfRange(f"PCI {raw_value} for '{image_id}' outside [0, 100]", path, line_no)
        if image_id in seen:
            raise DuplicateImageId(f"image '{image_id}' appears more than once", path, line_no)
        seen.add(image_id)
        records.append(RawRecord(image_ref=image_id, payload=PciRow(PciScore(value))))
    return records
