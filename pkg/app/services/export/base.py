from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping, Sequence
from typing import Any


class ReportExporter(ABC):
    """Abstract base class for report exporters."""

    @abstractmethod
    def write_jsonl(self, content: str, path: str) -> str:
        """Write an already rendered JSON-lines document and return its path."""
        pass

    @abstractmethod
    def write_csv(
        self, rows: Iterable[Mapping[str, Any]], fieldnames: Sequence[str], path: str
    ) -> str:
        """Write CSV rows with a header line."""
        pass

    @abstractmethod
    def write_json(self, payload: Any, path: str) -> str:
        """Write one JSON document."""
        pass
