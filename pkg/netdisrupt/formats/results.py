"""Deterministic JSON and CSV writers for identification results."""

from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from netdisrupt.core.models import DpoCellTable, DteCurve

FLOAT_FORMAT = "%.15g"


def format_number(value: float) -> str:
    return FLOAT_FORMAT % value


def to_jsonable(obj):
    """Convert results to plain JSON types, rounding floats to 15 significant digits."""
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return float(format_number(value))
    return obj


def dumps(data) -> str:
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def write_json(path: Path, data) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def write_frame(path: Path, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def cell_table_frame(table: DpoCellTable) -> pd.DataFrame:
    """One row per treated-arm value.

    Columns are lower/upper pairs per control-arm value, then the treated marginal.
    """
    columns: dict[str, list[float]] = {"y1": table.support1.tolist()}
    lower, upper = table.lower_matrix(), table.upper_matrix()
    for j, b in enumerate(table.support0):
        columns[f"lower[y0={b:g}]"] = lower[:, j].tolist()
        columns[f"upper[y0={b:g}]"] = upper[:, j].tolist()
    columns["marginal1"] = table.marginals1.tolist()
    return pd.DataFrame(columns)


def curve_frame(curve: DteCurve) -> pd.DataFrame:
    return pd.DataFrame({"y": curve.grid, "lower": curve.lower, "upper": curve.upper})
