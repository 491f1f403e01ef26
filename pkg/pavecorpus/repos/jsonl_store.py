"""JSON-lines repositories for annotations, corpus records and predictions"""

import json
import logging
import pathlib
from typing import Any, Callable, Dict, Generic, Iterable, Iterator, List, TypeVar

from pavecorpus.errors import MalformedJson
from pavecorpus.models.annotation import UnifiedAnnotation
from pavecorpus.models.evaluation import PredictionRecord
from pavecorpus.models.instruction import InstructionRecord

logger = logging.getLogger("pavecorpus.repos.jsonl_store")

T = TypeVar("T")


def dump_line(data: Dict[str, Any]) -> str:
    return json.dumps(data, ensure_ascii=False) + "\n"


class JsonlRepository(Generic[T]):
    """One model type per file, one JSON object per line"""

    def __init__(
        self,
        path: pathlib.Path,
        from_dict: Callable[[Dict[str, Any]], T],
        to_dict: Callable[[T], Dict[str, Any]],
    ):
        self.path = pathlib.Path(path)
        self._from_dict = from_dict
        self._to_dict = to_dict

    @property
    def exists(self) -> bool:
        return self.path.is_file()

    # =========================================================
    # READ
    # =========================================================

    def iter(self) -> Iterator[T]:
        with self.path.open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    yield self._from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                    raise MalformedJson(f"bad record: {e}", str(self.path), number) from None

    def read_all(self) -> List[T]:
        return list(self.iter())

    # =========================================================
    # WRITE
    # =========================================================

    def write_all(self, items: Iterable[T]) -> int:
        """Replace the file atomically; returns the number of lines written"""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        staging = self.path.with_suffix(self.path.suffix + ".tmp")
        count = 0
        with staging.open("w", encoding="utf-8", newline="\n") as handle:
            for item in items:
                handle.write(dump_line(self._to_dict(item)))
                count += 1
        staging.replace(self.path)
        logger.debug(f"Wrote {count} lines to {self.path}")
        return count


class AnnotationRepository(JsonlRepository[UnifiedAnnotation]):
    def __init__(self, path: pathlib.Path):
        super().__init__(path, UnifiedAnnotation.from_dict, UnifiedAnnotation.to_dict)

    def index(self) -> Dict[str, UnifiedAnnotation]:
        """Annotations keyed by image_ref"""
        return {a.image_ref: a for a in self.iter()}


class CorpusRepository(JsonlRepository[InstructionRecord]):
    def __init__(self, path: pathlib.Path):
        super().__init__(path, InstructionRecord.from_dict, InstructionRecord.to_dict)

    def index(self) -> Dict[str, InstructionRecord]:
        return {r.record_id: r for r in self.iter()}


class PredictionRepository(JsonlRepository[PredictionRecord]):
    def __init__(self, path: pathlib.Path):
        super().__init__(path, PredictionRecord.from_dict, PredictionRecord.to_dict)
