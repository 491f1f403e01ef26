# Repository package for JSON-lines stores and the run manifest

from .jsonl_store import AnnotationRepository, CorpusRepository, JsonlRepository, PredictionRepository
from .manifest import DatasetEntry, Manifest, load_manifest

__all__ = [
    'AnnotationRepository',
    'CorpusRepository',
    'DatasetEntry',
    'JsonlRepository',
    'Manifest',
    'PredictionRepository',
    'load_manifest',
]
