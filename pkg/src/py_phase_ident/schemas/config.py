"""Run and synthetic-data configuration models"""

import math
from pathlib import Path
from typing import Annotated, Any, Dict, List, Mapping, Optional, Tuple, Type, TypeVar

from dotenv import dotenv_values
from pydantic import (
    BaseModel,
    BeforeValidator,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from ..errors import ConfigError

N_PHASES = 3
N_DAILY = 6

DEFAULT_AMPS = [
    [0.020, 0.008, 0.004, 0.003, 0.002, 0.001],
    [0.018, 0.010, 0.003, 0.004, 0.001, 0.002],
    [0.022, 0.006, 0.005, 0.002, 0.003, 0.001],
]


def _default_phases() -> List[List[float]]:
    # phases sit 120 degrees apart at every harmonic
    return [
        [2 * math.pi * p / N_PHASES + 0.25 * h for h in range(N_DAILY)]
        for p in range(N_PHASES)
    ]


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _split_matrix(value):
    if isinstance(value, str):
        return [_split_list(row) for row in value.split(";") if row.strip()]
    return value


CommaList = Annotated[List[str], BeforeValidator(_split_list)]


class SynthConfig(BaseModel):
    """Synthetic feeder with known phase groups"""

    feeder_id: str = Field("F", description="Feeder identifier to emit")
    period_ids: CommaList = Field(default_factory=lambda: ["2021-06"])
    n_meters: int = Field(26, ge=1)
    n_transformers: int = Field(11, ge=1)
    phase_fractions: Annotated[
        Tuple[float, float, float], BeforeValidator(_split_list)
    ] = (13 / 26, 8 / 26, 5 / 26)
    hours: Optional[int] = Field(
        None, gt=0, description="Samples per period; defaults to the calendar month"
    )
    daily_harmonic_amps: Annotated[
        List[List[float]], BeforeValidator(_split_matrix)
    ] = Field(default_factory=lambda: [row[:] for row in DEFAULT_AMPS])
    harmonic_phases: Annotated[
        List[List[float]], BeforeValidator(_split_matrix)
    ] = Field(default_factory=_default_phases)
    trend_amp: float = Field(0.002, ge=0, description="Feeder-wide slow drift")
    noise_sigma: float = Field(0.01, ge=0)
    missing_rate: float = Field(0.0, ge=0, le=1)
    nominal_voltage: float = Field(240.0, gt=0)
    seed: int = 0

    @model_validator(mode="after")
    def _check(self):
        if abs(sum(self.phase_fractions) - 1.0) > 1e-12:
            raise ValueError(
                f"phase_fractions must sum to 1, got {sum(self.phase_fractions)!r}"
            )
        if any(f < 0 for f in self.phase_fractions):
            raise ValueError("phase_fractions must be non-negative")
        if self.hours is not None and self.hours % 24:
            raise ValueError(f"hours must be a multiple of 24, got {self.hours}")
        for name in ("daily_harmonic_amps", "harmonic_phases"):
            rows = getattr(self, name)
            if len(rows) != N_PHASES or any(len(r) != N_DAILY for r in rows):
                raise ValueError(f"{name} must be {N_PHASES} rows of {N_DAILY}")
        if not self.period_ids:
            raise ValueError("at least one period is required")
        return self


class RunConfig(BaseModel):
    """Inputs and parameters of a clustering run"""

    readings: Path
    topology: Path
    feeder: str
    periods: CommaList = Field(..., min_length=1)
    mask: str = Field("daily", description="fixed:n1,n2|topk:K|threshold:T|daily[:M]")
    k: int = Field(3, ge=1)
    out: Path = Path("out")
    standardize: bool = False
    seed: Optional[int] = None

    @field_validator("mask")
    @classmethod
    def _known_mask(cls, value: str) -> str:
        kind = value.partition(":")[0].strip().lower()
        if kind not in {"fixed", "topk", "threshold", "daily"}:
            raise ValueError(f"unknown mask kind {kind!r}")
        return value.strip()

    @model_validator(mode="after")
    def _paths_exist(self):
        for name in ("readings", "topology"):
            path = getattr(self, name)
            if not path.is_file():
                raise ValueError(f"{name} file not found: {path}")
        return self


M = TypeVar("M", bound=BaseModel)


def load_model(
    model: Type[M],
    config_path: Optional[Path] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> M:
    """
    Build ``model`` from a key-value config file plus flag overrides.

    Flags that are ``None`` do not override the file.
    """
    values: Dict[str, Any] = {}
    if config_path is not None:
        if not Path(config_path).is_file():
            raise ConfigError(f"config file not found: {config_path}")
        values.update(
            {k: v for k, v in dotenv_values(config_path).items() if v is not None}
        )
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return model.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"invalid {model.__name__}: {e}") from e
