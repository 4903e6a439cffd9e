"""Batch analysis configuration, read from YAML and validated with pydantic."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Annotated

import yaml
from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)
from pydantic import ValidationError as PydanticValidationError

from netdisrupt.core.models import DiagonalPolicy
from netdisrupt.errors import ConfigError
from netdisrupt.formats.network_io import IngestOptions, NetworkFormat


class Outcome(str, Enum):
    LEVELS = "levels"
    DID = "did"


class Adjustment(str, Enum):
    NONE = "none"
    REDUCTION = "reduction"


def _resolve(value: Path, info: ValidationInfo) -> Path:
    """Make a relative path absolute against the config file's directory."""
    base = (info.context or {}).get("base_dir")
    if base is not None and not value.is_absolute():
        value = Path(base) / value
    return value


ConfigPath = Annotated[Path, AfterValidator(_resolve)]


class NetworkInput(BaseModel):
    """One network file and how to read it."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    path: ConfigPath
    fmt: NetworkFormat | None = Field(default=None, alias="format")
    labels: ConfigPath | None = None
    weight_column: str = "weight"
    diagonal: DiagonalPolicy = DiagonalPolicy.ZERO

    def ingest_options(self, group: int, name: str) -> IngestOptions:
        return IngestOptions(
            labels=self.labels,
            weight_column=self.weight_column,
            diagonal=self.diagonal,
            group=group,
            name=name,
        )


class ArmInput(NetworkInput):
    """A treatment arm: its (post-period) network and an optional pre-period network."""

    pre: NetworkInput | None = None


class GroupSpec(BaseModel):
    """Agents whose attribute ``column`` is in ``rows``; with ``cols``, the cross-group dyads."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    column: str
    rows: list[str] = Field(min_length=1)
    cols: list[str] | None = None

    @field_validator("rows", "cols", mode="before")
    @classmethod
    def _as_strings(cls, value):
        if value is None:
            return None
        if not isinstance(value, list):
            value = [value]
        return [str(v) for v in value]

    @field_validator("name")
    @classmethod
    def _safe_name(cls, value: str) -> str:
        if value == "full" or "/" in value or value.startswith("."):
            raise ValueError(f"group name {value!r} is reserved or not a valid directory name")
        return value


class CovariateSpec(BaseModel):
    """Agent covariates used to bin dyads for the CATT comparison."""

    model_config = ConfigDict(extra="forbid")

    columns: list[str] = Field(min_length=1)
    bins: int = Field(default=4, ge=1)  # quantile bins for numeric columns


class AnalysisConfig(BaseModel):
    """Everything run_report needs."""

    model_config = ConfigDict(extra="forbid")

    name: str = "analysis"
    treated: ArmInput
    control: ArmInput
    outcome: Outcome = Outcome.LEVELS
    attributes: ConfigPath | None = None
    groups: list[GroupSpec] = Field(default_factory=list)
    covariates: CovariateSpec | None = None
    adjust: Adjustment = Adjustment.NONE
    denoise: str = "none"
    svt_constant: float = Field(default=2.01, gt=0)
    dte_grid: list[float] | None = None
    histogram_bins: int = Field(default=40, ge=1)
    kde_points: int = Field(default=512, ge=2)
    oracle: bool = True
    threads: int | None = Field(default=None, ge=1)
    output_dir: ConfigPath = Field(default=Path("report"), validate_default=True)

    @field_validator("denoise")
    @classmethod
    def _check_denoise(cls, value: str) -> str:
        value = value.strip().lower()
        if value in ("none", "svt"):
            return value
        if value.startswith("svt:"):
            try:
                tau = float(value[4:])
            except ValueError:
                raise ValueError(f"denoise threshold is not a number: {value!r}") from None
            if not tau > 0 or math.isnan(tau):
                raise ValueError(f"denoise threshold must be positive: {value!r}")
            return value
        raise ValueError(f"denoise must be none, svt or svt:<tau>, got {value!r}")

    @field_validator("dte_grid")
    @classmethod
    def _sorted_grid(cls, value: list[float] | None) -> list[float] | None:
        if value is None:
            return None
        if not value:
            raise ValueError("dte_grid must not be empty")
        return sorted(value)

    @model_validator(mode="after")
    def _check_consistency(self) -> AnalysisConfig:
        if self.outcome is Outcome.DID:
            missing = [arm for arm in ("treated", "control") if getattr(self, arm).pre is None]
            if missing:
                raise ValueError(
                    f"outcome 'did' needs a pre-period network for: {', '.join(missing)}"
                )
        if (self.groups or self.covariates) and self.attributes is None:
            raise ValueError("groups and covariates need an attributes file")
        names = [g.name for g in self.groups]
        if len(names) != len(set(names)):
            raise ValueError(f"group names must be unique, got {names}")
        return self

    @property
    def svt_tau(self) -> float | str | None:
        """None when denoising is off, "auto" for svt, or the explicit threshold."""
        if self.denoise == "none":
            return None
        if self.denoise == "svt":
            return "auto"
        return float(self.denoise[4:])

    def input_files(self) -> list[Path]:
        """Every file the analysis reads, in a fixed order."""
        files: list[Path] = []
        for arm in (self.treated, self.control):
            for source in (arm, arm.pre):
                if source is None:
                    continue
                files.append(source.path)
                if source.labels is not None:
                    files.append(source.labels)
        if self.attributes is not None:
            files.append(self.attributes)
        return files


def load_config(path: str | Path) -> AnalysisConfig:
    """Read and validate a YAML analysis config; relative paths resolve against its directory."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path.name}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path.name}: expected a mapping at the top level")

    try:
        config = AnalysisConfig.model_validate(raw, context={"base_dir": path.resolve().parent})
    except PydanticValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(f"{path.name}: {problems}") from exc

    missing = [str(p) for p in config.input_files() if not p.exists()]
    if missing:
        raise ConfigError(f"{path.name}: referenced files do not exist: {missing}")
    return config
