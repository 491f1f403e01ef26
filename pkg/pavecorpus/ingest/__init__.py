from pavecorpus.ingest.coco import parse_coco
from pavecorpus.ingest.color_folder import parse_color_folder
from pavecorpus.ingest.pci_csv import parse_pci_csv
from pavecorpus.ingest.scan import FORMATS, ScanOptions, ScanResult, ScannedItem, scan_dataset
from pavecorpus.ingest.voc import parse_voc, write_voc
from pavecorpus.ingest.yolo import parse_yolo, write_yolo

__all__ = [
    "FORMATS",
    "ScanOptions",
    "ScanResult",
    "ScannedItem",
    "parse_coco",
    "parse_color_folder",
    "parse_pci_csv",
    "parse_voc",
    "parse_yolo",
    "scan_dataset",
    "write_voc",
    "write_yolo",
]
