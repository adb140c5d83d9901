"""Meter series, topology and feeder dataset models"""

from datetime import datetime
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import TopologyError


def frozen_array(values) -> np.ndarray:
    """Copy ``values`` into a read-only float64 array"""
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


class MeterSeries(BaseModel):
    """One meter's hourly voltage trace for one period; NaN marks a missing hour"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    meter_id: str = Field(..., description="Opaque meter identifier")
    period_id: str = Field(..., description="Calendar month, YYYY-MM")
    start_time: datetime = Field(..., description="First hour of the period")
    values: np.ndarray = Field(..., description="Hourly samples, length N")

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value):
        array = frozen_array(value)
        if array.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if array.size == 0:
            raise ValueError("values must not be empty")
        return array

    @property
    def n_samples(self) -> int:
        return int(self.values.size)

    @property
    def is_complete(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    @property
    def missing_hours(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.values)))

    def with_values(self, values) -> "MeterSeries":
        return MeterSeries(
            meter_id=self.meter_id,
            period_id=self.period_id,
            start_time=self.start_time,
            values=values,
        )


class Topology(BaseModel):
    """Meter → transformer and meter → feeder linkage"""

    model_config = ConfigDict(frozen=True)

    meter_to_transformer: Dict[str, str] = Field(default_factory=dict)
    meter_to_feeder: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_linkage(self):
        if set(self.meter_to_transformer) != set(self.meter_to_feeder):
            raise ValueError("every meter needs both a transformer and a feeder")
        feeders: Dict[str, str] = {}
        for meter_id, transformer_id in self.meter_to_transformer.items():
            feeder_id = self.meter_to_feeder[meter_id]
            seen = feeders.setdefault(transformer_id, feeder_id)
            if seen != feeder_id:
                raise ValueError(
                    f"transformer {transformer_id} belongs to feeders {seen} and {feeder_id}"
                )
        return self

    def transformer_of(self, meter_id: str) -> str:
        try:
            return self.meter_to_transformer[meter_id]
        except KeyError as e:
            raise TopologyError(f"meter {meter_id} has no transformer") from e

    def feeder_of(self, meter_id: str) -> str:
        try:
            return self.meter_to_feeder[meter_id]
        except KeyError as e:
            raise TopologyError(f"meter {meter_id} has no feeder") from e

    def feeder_meters(self, feeder_id: str) -> List[str]:
        """Meters of a feeder in topology order"""
        return [m for m, f in self.meter_to_feeder.items() if f == feeder_id]

    def restricted(self, meter_ids: Iterable[str]) -> "Topology":
        keep = set(meter_ids)
        return Topology(
            meter_to_transformer={
                m: t for m, t in self.meter_to_transformer.items() if m in keep
            },
            meter_to_feeder={m: f for m, f in self.meter_to_feeder.items() if m in keep},
        )


class FeederDataset(BaseModel):
    """All meters of one feeder over one period"""

    model_config = ConfigDict(frozen=True)

    feeder_id: str
    period_id: str
    series: Tuple[MeterSeries, ...] = ()
    topology: Topology = Field(default_factory=Topology)

    @model_validator(mode="after")
    def _check_series(self):
        lengths = {s.n_samples for s in self.series}
        if len(lengths) > 1:
            raise ValueError(f"series lengths differ: {sorted(lengths)}")
        for s in self.series:
            if s.period_id != self.period_id:
                raise ValueError(
                    f"meter {s.meter_id} is from period {s.period_id}, not {self.period_id}"
                )
        ids = self.meter_ids
        if len(set(ids)) != len(ids):
            raise ValueError("meter ids must be unique within a dataset")
        return self

    @property
    def meter_ids(self) -> List[str]:
        return [s.meter_id for s in self.series]

    @property
    def n_samples(self) -> Optional[int]:
        return self.series[0].n_samples if self.series else None

    def __len__(self) -> int:
        return len(self.series)

    def get(self, meter_id: str) -> Optional[MeterSeries]:
        for s in self.series:
            if s.meter_id == meter_id:
                return s
        return None

    def with_series(self, series: Iterable[MeterSeries]) -> "FeederDataset":
        series = tuple(series)
        return FeederDataset(
            feeder_id=self.feeder_id,
            period_id=self.period_id,
            series=series,
            topology=self.topology.restricted(s.meter_id for s in series),
        )


class FeederStudy(BaseModel):
    """One feeder observed over several periods"""

    model_config = ConfigDict(frozen=True)

    feeder_id: str
    datasets: Dict[str, FeederDataset] = Field(default_factory=dict)

    @property
    def period_ids(self) -> List[str]:
        return list(self.datasets)

    def __getitem__(self, period_id: str) -> FeederDataset:
        return self.datasets[period_id]
