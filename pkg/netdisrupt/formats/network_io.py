"""Reading and writing networks: edge lists, dense CSV matrices and JSON."""

from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from netdisrupt.core.models import DiagonalPolicy, Network
from netdisrupt.errors import ValidationError

logger = logging.getLogger(__name__)


class NetworkFormat(str, Enum):
    """On-disk network formats."""

    EDGE_LIST = "edge_list"
    DENSE_CSV = "dense_csv"
    JSON = "json"

    @classmethod
    def infer(cls, path: Path) -> NetworkFormat:
        if path.suffix.lower() == ".json":
            return cls.JSON
        raise ValidationError(
            f"cannot infer the format of {path.name}; pass edge_list or dense_csv explicitly"
        )


class IngestOptions(BaseModel):
    """How to turn a file into a Network."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    labels: Path | None = None  # label manifest, one label per line
    weight_column: str = "weight"
    diagonal: DiagonalPolicy = DiagonalPolicy.ZERO
    group: int = Field(default=0, ge=0, le=1)
    name: str = ""


def read_labels(path: Path) -> list[str]:
    """Read a label manifest: one label per non-blank line."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read label manifest {path}: {exc}") from exc
    return [line.strip() for line in lines if line.strip()]


def _apply_diagonal(values: np.ndarray, policy: DiagonalPolicy) -> np.ndarray:
    if policy is DiagonalPolicy.ZERO:
        np.fill_diagonal(values, 0.0)
    return values


def _read_edge_list(path: Path, options: IngestOptions) -> tuple[list[str], np.ndarray]:
    frame = pd.read_csv(path, dtype={"src": str, "dst": str}, skipinitialspace=True)
    missing = {"src", "dst"} - set(frame.columns)
    if missing:
        raise ValidationError(
            f"{path.name}: edge list needs columns src,dst; missing {sorted(missing)}"
        )

    if options.labels is not None:
        labels = read_labels(options.labels)
        unknown = sorted((set(frame["src"]) | set(frame["dst"])) - set(labels))
        if unknown:
            raise ValidationError(f"{path.name}: edges reference undeclared labels {unknown}")
    else:
        labels = list(dict.fromkeys(list(frame["src"]) + list(frame["dst"])))

    weighted = options.weight_column in frame.columns
    if weighted:
        weights = frame[options.weight_column].astype(float)
    else:
        weights = pd.Series(1.0, index=frame.index)
    if weights.isna().any():
        row = int(weights.isna().to_numpy().argmax())
        raise ValidationError(f"{path.name}: NaN weight on edge row {row + 1}")

    index = {label: k for k, label in enumerate(labels)}
    n = len(labels)
    values = np.zeros((n, n))
    seen = np.zeros((n, n), dtype=bool)
    for src, dst, weight in zip(frame["src"], frame["dst"], weights, strict=True):
        i, j = index[src], index[dst]
        if seen[i, j] and values[i, j] != weight:
            raise ValidationError(
                f"{path.name}: conflicting entries for dyad ({src}, {dst}): "
                f"{values[i, j]:g} and {weight:g}"
            )
        values[i, j] = values[j, i] = weight
        seen[i, j] = seen[j, i] = True
    return labels, values


def _read_dense(path: Path, options: IngestOptions) -> tuple[list[str], np.ndarray]:
    try:
        values = pd.read_csv(path, header=None, skipinitialspace=True).to_numpy(dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path.name}: non-numeric entry in dense matrix: {exc}") from exc
    if options.labels is not None:
        labels = read_labels(options.labels)
    else:
        labels = [str(k) for k in range(values.shape[0])]
    return labels, values


def _read_json(path: Path) -> tuple[list[str], np.ndarray, np.ndarray | None, dict]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path.name}: invalid JSON: {exc}") from exc
    if "matrix" not in data:
        raise ValidationError(f"{path.name}: JSON network needs a 'matrix' key")
    values = np.array(data["matrix"], dtype=float)
    labels = data.get("labels") or [str(k) for k in range(len(values))]
    mask = np.array(data["mask"], dtype=bool) if data.get("mask") is not None else None
    return [str(label) for label in labels], values, mask, data


def load_network(
    path: str | Path,
    fmt: NetworkFormat | str | None = None,
    options: IngestOptions | None = None,
) -> Network:
    """Load a symmetric network from disk.

    Args:
        path: File to read.
        fmt: edge_list, dense_csv or json; inferred from a .json suffix when omitted.
        options: Label manifest, weight column, diagonal policy, group tag and name.

    Returns:
        Validated Network. Dyads absent from an edge list are 0.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"network file not found: {path}")
    options = options or IngestOptions()
    fmt = NetworkFormat(fmt) if fmt is not None else NetworkFormat.infer(path)
    name = options.name or path.stem

    mask = None
    group = options.group
    diagonal = options.diagonal
    if fmt is NetworkFormat.EDGE_LIST:
        labels, values = _read_edge_list(path, options)
    elif fmt is NetworkFormat.DENSE_CSV:
        labels, values = _read_dense(path, options)
    else:
        labels, values, mask, data = _read_json(path)
        name = options.name or data.get("name") or name
        group = data.get("group", group)
        diagonal = DiagonalPolicy(data.get("diagonal_policy", diagonal))

    net = Network(
        labels=tuple(labels),
        values=_apply_diagonal(values, diagonal),
        mask=mask,
        group=group,
        diagonal_policy=diagonal,
        name=name,
    )
    logger.info(
        "loaded %s: N=%d, %d nonzero dyads, %d masked cells",
        name,
        net.n,
        int(np.count_nonzero(np.triu(net.values, 1))),
        int(net.mask.sum()),
    )
    return net


def save_network(net: Network, path: str | Path) -> Path:
    """Write a network in the JSON format read by load_network."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(net.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
