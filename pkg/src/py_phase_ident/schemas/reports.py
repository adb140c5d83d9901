"""Validation and embedding report models"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class PurityReport(BaseModel):
    """Transformer x cluster contingency counts"""

    model_config = ConfigDict(frozen=True)

    period_id: Optional[str] = None
    labels: List[str] = Field(..., description="Cluster columns in order")
    transformers: List[str] = Field(..., description="Transformer rows in order")
    table: Dict[str, Dict[str, int]] = Field(
        ..., description="transformer -> label -> meter count"
    )
    column_totals: Dict[str, int]
    total: int
    majority: Dict[str, str] = Field(..., description="transformer -> majority label")
    impure_transformers: List[str]
    purity: float = Field(..., ge=0, le=1)

    @property
    def is_pure(self) -> bool:
        return not self.impure_transformers


class StabilityReport(BaseModel):
    """Cross tabulation of two periods after label alignment"""

    model_config = ConfigDict(frozen=True)

    first_period: Optional[str] = None
    second_period: Optional[str] = None
    labels: List[str]
    cross_tab: Dict[str, Dict[str, int]] = Field(
        ..., description="first label -> aligned second label -> count"
    )
    alignment: Dict[str, str] = Field(
        ..., description="second-period label -> first-period label"
    )
    common_meters: int
    stable_fraction: float = Field(..., ge=0, le=1)
    unstable_meters: List[str]
    only_in_first: List[str] = Field(default_factory=list)
    only_in_second: List[str] = Field(default_factory=list)

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.cross_tab[label][label] for label in self.labels)


class Embedding2D(BaseModel):
    """Planar coordinates per meter from classical scaling"""

    model_config = ConfigDict(frozen=True)

    coords: Dict[str, Tuple[float, float]]
    stress: float = Field(..., ge=0)
    rank: int = Field(..., ge=0, le=2)
    eigenvalues: Tuple[float, float] = (0.0, 0.0)
