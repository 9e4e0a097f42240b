"""
Escritura de resultados: filas CSV y documentos JSON.
"""
import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from src.infrastructure.logging.logger import logger

FLOAT_FORMAT = "%.17g"


def _format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    return str(value)


def write_rows_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a header and the rows, floats with 17 significant digits.

    Args:
        path (Path): Destination file; parent directories are created.
        columns (Sequence[str]): Header names.
        rows (Iterable[Sequence[Any]]): One sequence per row, in column order.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"Row has {len(row)} cells, header has {len(columns)}")
            writer.writerow([_format_cell(value) for value in row])
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return path


def read_rows_csv(path: Path):
    """Read back a CSV written by ``write_rows_csv`` as (columns, rows of strings)."""
    with open(Path(path), "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        columns = next(reader)
        return columns, [row for row in reader]


def _to_plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (tuple, set, frozenset)):
        return list(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: Path, payload: Any) -> Path:
    """Write ``payload`` as indented JSON with sorted keys."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_to_plain, allow_nan=False)
        f.write("\n")
    logger.debug(f"Wrote {path}")
    return path


def read_json(path: Path) -> Any:
    with open(Path(path), "r", encoding="utf-8") as f:
        return json.load(f)
