import csv
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

from app.core.config import settings
from app.services.export.base import ReportExporter

logger = logging.getLogger(__name__)


class LocalReportExporter(ReportExporter):
    """Local filesystem exporter; relative paths land under ``REPORT_ROOT``."""

    def __init__(self, root: str | Path | None = None) -> None:
        self.root = Path(root or settings.REPORT_ROOT)

    def _resolve(self, path: str) -> Path:
        target = Path(path)
        if not target.is_absolute():
            target = self.root / target
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def write_jsonl(self, content: str, path: str) -> str:
        target = self._resolve(path)
        target.write_text(content, encoding='utf-8')
        logger.info('Wrote %s', target)
        return str(target)

    def write_csv(
        self, rows: Iterable[Mapping[str, Any]], fieldnames: Sequence[str], path: str
    ) -> str:
        target = self._resolve(path)
        with target.open('w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames))
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
        logger.info('Wrote %s', target)
        return str(target)

    def write_json(self, payload: Any, path: str) -> str:
        target = self._resolve(path)
        target.write_text(json.dumps(payload, indent=2) + '\n', encoding='utf-8')
        logger.info('Wrote %s', target)
        return str(target)


# Create singleton instance
report_exporter = LocalReportExporter()
