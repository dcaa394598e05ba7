"""Experiment configuration: INI files read with configparser, validated by pydantic.

Values come from the [experiment] section, then from a section named after the command,
then from command-line flags; later sources win. Lists are comma-separated, except
functionals and groups, which carry commas of their own and are separated by semicolons.
"""

import configparser
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from irs_lab.core.exceptions import ExperimentConfigError
from irs_lab.core.schedules import CUSP_DELTA_GRID, ESCAPE_RADIUS, ESCAPE_STEPS
from irs_lab.modules.irs.functionals import parse_functional
from irs_lab.settings import settings

logger = logging.getLogger(__name__)

COMMANDS = (
    "area-check",
    "dirichlet",
    "degenerate",
    "chabauty-dist",
    "escape",
    "irs-estimate",
    "fiber-bound",
    "collision",
)

_LIST_FIELDS = {"schedule", "deltas", "x_range", "y_range"}
_SEMICOLON_FIELDS = {"functionals", "groups"}


class ExperimentConfig(BaseModel):
    """Everything one subcommand run needs; equal configs give byte-identical outputs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str = Field(..., description="Subcommand to run")
    groups: List[str] = Field(
        default_factory=list,
        description="Group fixtures: a fixture file path, or a named fixture with optional key=value parameters",
    )
    family: Optional[str] = Field(None, description="Degeneration family, or algebraic / constant for chabauty-dist")
    schedule: Optional[List[float]] = Field(None, description="Strictly decreasing family parameters")
    functionals: List[str] = Field(
        default_factory=lambda: ["ClippedInjRad(1)", "SoftCount(1,0.5)"], description="Test functionals"
    )
    radius: float = Field(settings.SNAPSHOT_RADIUS, gt=0.0, description="Snapshot radius R")
    delta: float = Field(settings.CUSP_DELTA, gt=0.0, description="Cusp cut δ")
    n: int = Field(settings.N_SAMPLES, ge=2, description="Monte Carlo samples per estimate")
    seed: int = Field(settings.MASTER_SEED, description="Master seed")
    workers: Optional[int] = Field(None, ge=1, description="Worker processes; defaults to the core count")
    tolerance: float = Field(1e-4, ge=0.0, description="Relative tolerance of the area checks")
    deltas: List[float] = Field(default_factory=lambda: list(CUSP_DELTA_GRID), description="Cusp strip δ grid")
    resolution: Optional[int] = Field(None, ge=16, description="Quadrature grid per axis for the area checks")
    epsilon: Optional[float] = Field(None, gt=0.0, description="Matching tolerance ε of the convergence check")
    margin: Optional[float] = Field(None, ge=0.0, description="Inner-radius margin of snapshot distances")
    steps: int = Field(ESCAPE_STEPS, ge=0, description="Unit steps into the cusp")
    escape_radius: float = Field(ESCAPE_RADIUS, gt=0.0, description="Snapshot radius of the escape run")
    surface: str = Field("2,0", description="Signature 'g,p' for the fiber bound")
    output_dir: str = Field(settings.OUTPUT_DIR, description="Directory for CSV, JSON, SVG and text outputs")
    csv_path: Optional[str] = Field(None, description="CSV output, defaults to <output_dir>/<command>.csv")
    json_path: Optional[str] = Field(None, description="JSON output, defaults to <output_dir>/<command>.json")
    svg_path: Optional[str] = Field(None, description="SVG output, defaults to <output_dir>/<command>.svg")
    x_range: Optional[Tuple[float, float]] = Field(None, description="SVG viewport x-range")
    y_range: Optional[Tuple[float, float]] = Field(None, description="SVG viewport y-range")
    stroke_width: float = Field(1.0, gt=0.0, description="SVG stroke width")

    @field_validator("command")
    @classmethod
    def _known_command(cls, value: str) -> str:
        if value not in COMMANDS:
            raise ValueError(f"unknown command {value!r}; known: {', '.join(COMMANDS)}")
        return value

    @field_validator("functionals")
    @classmethod
    def _parsable_functionals(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one functional is needed")
        for text in value:
            parse_functional(text)
        return value

    @field_validator("groups")
    @classmethod
    def _fixture_files_exist(cls, value: List[str]) -> List[str]:
        for spec in value:
            if looks_like_path(spec) and not Path(spec).is_file():
                raise ValueError(f"fixture file {spec} does not exist")
        return value

    @model_validator(mode="after")
    def _check_schedule(self) -> "ExperimentConfig":
        if self.schedule is not None:
            if not self.schedule:
                raise ValueError("schedule is empty")
            if any(a <= b for a, b in zip(self.schedule, self.schedule[1:])):
                raise ValueError(f"schedule must be strictly decreasing, got {self.schedule}")
        return self

    @property
    def worker_count(self) -> int:
        return self.workers if self.workers is not None else (os.cpu_count() or 1)

    def output(self, kind: str) -> Path:
        explicit = {"csv": self.csv_path, "json": self.json_path, "svg": self.svg_path}.get(kind)
        if explicit:
            return Path(explicit)
        return Path(self.output_dir) / f"{self.command}.{kind}"


def looks_like_path(spec: str) -> bool:
    return os.sep in spec or "/" in spec or spec.endswith((".txt", ".group"))


def _split(key: str, value: str) -> Any:
    if key in _SEMICOLON_FIELDS:
        return [part.strip() for part in value.split(";") if part.strip()]
    if key in _LIST_FIELDS:
        return [part.strip() for part in value.split(",") if part.strip()]
    return value.strip()


def read_ini(path: Path, command: str) -> Dict[str, Any]:
    """Flat key/value pairs of [experiment] and [<command>].

    Raises:
        ExperimentConfigError: If the file is missing or unreadable
    """
    if not path.is_file():
        raise ExperimentConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ExperimentConfigError(f"reading {path} failed: {str(e)}") from e
    values: Dict[str, Any] = {}
    for section in ("experiment", command):
        if parser.has_section(section):
            values.update({key: _split(key, raw) for key, raw in parser.items(section)})
    values.pop("command", None)
    return values


def load_config(command: str, path: Optional[Path] = None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Merge the INI file and the flag overrides into a validated config.

    Raises:
        ExperimentConfigError: If the file is missing or a value is invalid
    """
    values: Dict[str, Any] = read_ini(Path(path), command) if path is not None else {}
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    values["command"] = command
    try:
        config = ExperimentConfig(**values)
    except ValidationError as e:
        raise ExperimentConfigError(f"invalid configuration: {str(e)}") from e
    logger.debug(f"Configuration for {command}: {config.model_dump()}")
    return config
