from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Union

from configuration import Configuration as Config
from models.train_config import StepMetrics


class MetricsLog:
    """
    Step-indexed CSV training log.

    A fresh log starts with the header only; `append=True` keeps the rows of an
    existing log so a resumed run continues it.
    """

    def __init__(self, csv_path: Union[str, Path], *, append: bool = False, encoding: str = "utf-8") -> None:
        self.path = Path(csv_path)
        self.encoding = encoding
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not (append and self.path.is_file()):
            with self.path.open("w", newline="", encoding=encoding) as f:
                csv.DictWriter(f, fieldnames=Config.metrics_log_fields).writeheader()

    def write(self, metrics: StepMetrics) -> None:
        with self.path.open("a", newline="", encoding=self.encoding) as f:
            csv.DictWriter(f, fieldnames=Config.metrics_log_fields).writerow(metrics.log_row())


def read_metrics_log(csv_path: Union[str, Path], encoding: str = "utf-8") -> List[Dict[str, str]]:
    with Path(csv_path).open("r", newline="", encoding=encoding) as f:
        return list(csv.DictReader(f))
