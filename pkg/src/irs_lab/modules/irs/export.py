"""CSV tables and JSON summaries, formatted so that equal results give equal bytes."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from irs_lab.modules.irs.experiments import EstimateRow

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("t", "functional", "mean", "std_error", "bias_bound", "n", "seed")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def format_table(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def format_rows(rows: Iterable[EstimateRow]) -> str:
    return format_table(
        CSV_COLUMNS,
        ((float(r.t), r.functional, float(r.mean), float(r.std_error), float(r.bias_bound), r.n, r.seed) for r in rows),
    )


def _write(text: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_rows(rows: Iterable[EstimateRow], path: Union[str, Path]) -> Path:
    return _write(format_rows(rows), path)


def write_table(columns: Sequence[str], rows: Iterable[Sequence[Any]], path: Union[str, Path]) -> Path:
    return _write(format_table(columns, rows), path)


def format_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(data: Any, path: Union[str, Path]) -> Path:
    return _write(format_json(data), path)
