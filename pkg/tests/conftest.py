"""Shared fixtures: series builders, CSV writers and published feeder tables"""

from datetime import datetime
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np
import pytest

from py_phase_ident.schemas import ClusterAssignment, MeterSeries, Topology
from py_phase_ident.schemas.config import SynthConfig

# transformer -> meters in clusters (A, B, C), June
FEEDER_F_JUNE = [
    ("1", 1, 8, 0),
    ("2", 1, 0, 0),
    ("3", 1, 0, 0),
    ("4", 1, 0, 0),
    ("5", 0, 0, 1),
    ("6", 4, 0, 0),
    ("7", 0, 0, 1),
    ("8", 0, 0, 1),
    ("9", 0, 0, 1),
    ("10", 0, 0, 1),
    ("11", 5, 0, 0),
]

FEEDER_D_JUNE = [
    ("1", 1, 0, 0), ("2", 1, 0, 0), ("3", 1, 0, 0), ("4", 1, 0, 0),
    ("5", 2, 0, 0), ("6", 1, 0, 0), ("7", 0, 0, 1), ("8", 1, 0, 0),
    ("9", 1, 0, 0), ("10", 4, 0, 0), ("11", 1, 0, 0), ("12", 0, 0, 1),
    ("13", 0, 0, 1), ("14", 1, 0, 0), ("15", 0, 1, 0), ("16", 1, 0, 0),
    ("17", 2, 0, 0), ("18", 1, 0, 0), ("19", 1, 0, 0), ("20", 0, 1, 0),
    ("21", 0, 1, 0), ("22", 0, 3, 0), ("23", 0, 1, 0), ("24", 0, 2, 0),
    ("25", 2, 0, 0), ("26", 0, 1, 0), ("27", 1, 0, 0), ("28", 1, 0, 0),
    ("29", 0, 1, 0), ("30", 1, 0, 0), ("31", 2, 0, 0), ("32", 1, 0, 0),
    ("33", 4, 0, 0), ("34", 1, 0, 0), ("35", 1, 0, 0), ("36", 0, 1, 0),
    ("37", 2, 0, 0), ("38", 3, 0, 0), ("39", 0, 1, 0),
]  # fmt: skip


def table_fixture(
    rows: Sequence[Tuple[str, int, int, int]], feeder_id: str, period_id: str
) -> Tuple[ClusterAssignment, Topology]:
    """Expand transformer x cluster counts into meters with those labels"""
    labels: Dict[str, str] = {}
    transformers: Dict[str, str] = {}
    for transformer_id, *counts in rows:
        for label, count in zip("ABC", counts):
            for _ in range(count):
                meter_id = f"{feeder_id}-{len(labels) + 1:03d}"
                labels[meter_id] = label
                transformers[meter_id] = transformer_id
    assignment = ClusterAssignment(labels=labels, k=3, period_id=period_id)
    topology = Topology(
        meter_to_transformer=transformers,
        meter_to_feeder={m: feeder_id for m in transformers},
    )
    return assignment, topology


@pytest.fixture
def feeder_f_june():
    return table_fixture(FEEDER_F_JUNE, "F", "2021-06")


@pytest.fixture
def feeder_d_june():
    return table_fixture(FEEDER_D_JUNE, "D", "2021-06")


@pytest.fixture
def rng():
    return np.random.default_rng(20210601)


def make_series(
    values, meter_id: str = "M1", period_id: str = "2021-06"
) -> MeterSeries:
    return MeterSeries(
        meter_id=meter_id,
        period_id=period_id,
        start_time=datetime(2021, 6, 1),
        values=values,
    )


@pytest.fixture
def series_factory():
    return make_series


def write_csv(path: Path, header: str, rows: List[str]) -> Path:
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def csv_writer(tmp_path):
    def _write(name: str, header: str, rows: List[str]) -> Path:
        return write_csv(tmp_path / name, header, rows)

    return _write


@pytest.fixture
def small_synth_config() -> SynthConfig:
    """Feeder F sized, over two months"""
    return SynthConfig(
        feeder_id="F",
        period_ids=["2021-06", "2021-07"],
        n_meters=26,
        n_transformers=11,
        seed=7,
    )


@pytest.fixture(scope="session")
def feeder_d_config() -> SynthConfig:
    return SynthConfig(
        feeder_id="D",
        period_ids=["2021-06", "2021-07"],
        n_meters=55,
        n_transformers=39,
        phase_fractions=(39 / 55, 13 / 55, 3 / 55),
        noise_sigma=0.01,
    )
