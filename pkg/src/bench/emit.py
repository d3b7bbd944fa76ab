"""
Result emitters: CSV and JSON writers, and the matching reader used by `compare`.
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.core.exceptions import OutputError
from src.core.json_utils import dumps_deterministic
from src.core.utils import ensure_directory

from .sweep import SweepResult
from .table import ResultTable

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "OutputFormat":
        suffix = Path(path).suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError:
            raise OutputError(str(path), ValueError(f"unknown result format '.{suffix}'"))


def _as_table(result: Union[SweepResult, ResultTable]) -> ResultTable:
    return result.to_table() if isinstance(result, SweepResult) else result


def render(
    result: Union[SweepResult, ResultTable], output_format: Union[OutputFormat, str]
) -> str:
    """
    Render a result as text.

    CSV holds the columns only: a header row, then one row per axis point with 17 significant
    digits. JSON holds the metadata object and the column arrays. Non-finite values are written
    as `nan` in CSV and `null` in JSON.
    """
    table = _as_table(result)
    output_format = OutputFormat(output_format)
    if output_format == OutputFormat.CSV:
        frame = pd.DataFrame(table.columns)
        return frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n")
    document = {
        "metadata": table.metadata,
        "columns": {name: values for name, values in table.columns.items()},
    }
    return dumps_deterministic(document)


def emit(
    result: Union[SweepResult, ResultTable],
    output_format: Union[OutputFormat, str],
    path: Union[str, Path],
) -> Path:
    """
    Write a result to a file.

    Args:
        result: Sweep result or table
        output_format: "csv" or "json"
        path: Destination file; missing parent directories are created

    Returns:
        The written path

    Raises:
        OutputError: If the file cannot be written
    """
    output_format = OutputFormat(output_format)
    path = Path(path)
    text = render(result, output_format)
    try:
        ensure_directory(path.parent)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(str(path), e)
    logger.info(f"Wrote {output_format.value.upper()} result to {path}")
    return path


def load_result(path: Union[str, Path]) -> ResultTable:
    """
    Read a CSV or JSON result back into a table, bit for bit.

    Raises:
        OutputError: If the file is missing, unreadable or malformed
    """
    path = Path(path)
    output_format = OutputFormat.from_path(path)
    try:
        if output_format == OutputFormat.CSV:
            frame = pd.read_csv(path, float_precision="round_trip")
            columns = {name: frame[name].to_numpy(dtype=np.float64) for name in frame.columns}
            return ResultTable(columns=columns)
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
        columns = {
            name: np.array([np.nan if v is None else v for v in values], dtype=np.float64)
            for name, values in document["columns"].items()
        }
        return ResultTable(columns=columns, metadata=document.get("metadata", {}))
    except (OSError, ValueError, KeyError, TypeError, pd.errors.ParserError) as e:
        raise OutputError(str(path), e)
