import csv
import logging
from pathlib import Path

from .base import MetricsChannel

logger = logging.getLogger("PlatoNav.eval")


class CsvMetricsChannel(MetricsChannel):
    """
    Writes one CSV row per record under a fixed header

    Args:
        path: Output file, truncated on construction
        columns: Header names
    """

    def __init__(self, path, columns):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = self.path.open("w", newline="")
        self._writer = csv.writer(self._file, lineterminator="\n")
        self._writer.writerow(columns)
        self._file.flush()

    def publish(self, record):
        self._writer.writerow(record.row())
        self._file.flush()

    def close(self):
        if not self._file.closed:
            self._file.close()
            logger.info(f"Metrics written to {self.path}")
