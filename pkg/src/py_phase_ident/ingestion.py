"""Readings/topology CSV ingestion, completeness filtering and normalization"""

import calendar
import re
from datetime import datetime
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import (
    DegenerateSeriesError,
    ParameterError,
    ParseError,
    TopologyError,
)
from .logging_config import get_logger
from .schemas.series import FeederDataset, FeederStudy, MeterSeries, Topology

logger = get_logger(__name__)

READINGS_COLUMNS = ["meter_id", "timestamp", "voltage"]
TOPOLOGY_COLUMNS = ["meter_id", "transformer_id", "feeder_id"]
MISSING_TOKENS = {"", "null", "nan", "na", "none"}

_PERIOD_RE = re.compile(r"^(\d{4})-(\d{2})$")
_LINE_RE = re.compile(r"line (\d+)")
_OFFSET_RE = r"\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?\s*(?:Z|[+-]\d{2}(?::?\d{2})?)$"
HOUR = pd.Timedelta(hours=1)


def period_bounds(period_id: str) -> Tuple[datetime, int]:
    """Resolve ``YYYY-MM`` to the first hour of the month and its hour count"""
    match = _PERIOD_RE.match(period_id)
    if not match:
        raise ParameterError(f"period must look like YYYY-MM, got {period_id!r}")
    year, month = int(match.group(1)), int(match.group(2))
    if not 1 <= month <= 12:
        raise ParameterError(f"invalid month in period {period_id!r}")
    days = calendar.monthrange(year, month)[1]
    return datetime(year, month, 1), days * 24


def _read_csv(path: Path, columns: List[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError as e:
        raise ParseError("file is empty", line=1, path=path) from e
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(f"wrong number of fields ({e})", line=line, path=path) from e

    header = [c.strip() for c in frame.columns]
    if header != columns:
        raise ParseError(
            f"expected header {','.join(columns)}, got {','.join(header)}",
            line=1,
            path=path,
        )
    frame.columns = columns
    for column in columns:
        frame[column] = frame[column].str.strip()
    # header is line 1
    frame["line"] = np.arange(len(frame)) + 2
    return frame


def _first_line(frame: pd.DataFrame, mask: pd.Series) -> int:
    return int(frame.loc[mask, "line"].iloc[0])


def load_topology(topology_path: Union[str, Path]) -> Topology:
    """Parse ``meter_id,transformer_id,feeder_id``"""
    path = Path(topology_path)
    frame = _read_csv(path, TOPOLOGY_COLUMNS)

    blank = (frame[TOPOLOGY_COLUMNS] == "").any(axis=1)
    if blank.any():
        raise ParseError("empty field", line=_first_line(frame, blank), path=path)

    duplicated = frame["meter_id"].duplicated()
    if duplicated.any():
        line = _first_line(frame, duplicated)
        meter_id = frame.loc[duplicated, "meter_id"].iloc[0]
        raise TopologyError(f"{path}:{line}: meter {meter_id} listed twice")

    feeders = frame.groupby("transformer_id", sort=False)["feeder_id"].nunique()
    split = feeders[feeders > 1]
    if not split.empty:
        raise TopologyError(
            f"{path}: transformer {split.index[0]} belongs to more than one feeder"
        )

    topology = Topology(
        meter_to_transformer=dict(zip(frame["meter_id"], frame["transformer_id"])),
        meter_to_feeder=dict(zip(frame["meter_id"], frame["feeder_id"])),
    )
    logger.debug(f"Loaded topology for {len(frame)} meters from {path}")
    return topology


def read_readings(readings_path: Union[str, Path]) -> pd.DataFrame:
    """
    Parse ``meter_id,timestamp,voltage`` into typed columns.

    Empty or null voltages become NaN (a missing hour). Malformed rows raise
    ``ParseError`` with the offending line number.
    """
    path = Path(readings_path)
    frame = _read_csv(path, READINGS_COLUMNS)

    blank_id = frame["meter_id"] == ""
    if blank_id.any():
        raise ParseError("empty meter_id", line=_first_line(frame, blank_id), path=path)

    aware = frame["timestamp"].str.strip().str.contains(_OFFSET_RE, regex=True)
    mixed = aware != aware.iloc[0] if len(aware) else aware
    if mixed.any():
        line = _first_line(frame, mixed)
        raw = frame.loc[mixed, "timestamp"].iloc[0]
        raise ParseError(
            f"timestamp {raw!r} mixes offset and naive stamps", line=line, path=path
        )
    timestamps = pd.to_datetime(
        frame["timestamp"], format="ISO8601", errors="coerce", utc=bool(aware.any())
    )
    bad_time = timestamps.isna()
    if bad_time.any():
        line = _first_line(frame, bad_time)
        raw = frame.loc[bad_time, "timestamp"].iloc[0]
        raise ParseError(f"invalid timestamp {raw!r}", line=line, path=path)
    if aware.any():
        timestamps = timestamps.dt.tz_localize(None)
    off_hour = timestamps != timestamps.dt.floor("h")
    if off_hour.any():
        line = _first_line(frame, off_hour)
        raw = frame.loc[off_hour, "timestamp"].iloc[0]
        raise ParseError(f"timestamp {raw!r} is not on the hour", line=line, path=path)

    raw_voltage = frame["voltage"]
    missing = raw_voltage.str.lower().isin(MISSING_TOKENS)
    voltage = pd.to_numeric(raw_voltage.where(~missing), errors="coerce")
    bad_voltage = voltage.isna() & ~missing
    if bad_voltage.any():
        line = _first_line(frame, bad_voltage)
        raw = raw_voltage[bad_voltage].iloc[0]
        raise ParseError(f"non-numeric voltage {raw!r}", line=line, path=path)

    readings = pd.DataFrame(
        {
            "meter_id": frame["meter_id"],
            "timestamp": timestamps,
            "voltage": voltage.astype(np.float64),
            "line": frame["line"],
        }
    )

    duplicated = readings.duplicated(subset=["meter_id", "timestamp"])
    if duplicated.any():
        line = _first_line(readings, duplicated)
        meter_id = readings.loc[duplicated, "meter_id"].iloc[0]
        raise ParseError(
            f"duplicate timestamp for meter {meter_id}", line=line, path=path
        )

    logger.debug(f"Parsed {len(readings)} readings from {path}")
    return readings


def build_dataset(
    readings: pd.DataFrame,
    topology: Topology,
    feeder_id: str,
    period_id: str,
) -> FeederDataset:
    """Lay one period's readings of a feeder onto the hourly grid"""
    start, hours = period_bounds(period_id)
    meter_ids = topology.feeder_meters(feeder_id)
    row_of = {meter_id: i for i, meter_id in enumerate(meter_ids)}

    grid = np.full((len(meter_ids), hours), np.nan)
    offsets = (readings["timestamp"] - pd.Timestamp(start)) // HOUR
    in_period = (offsets >= 0) & (offsets < hours) & readings["meter_id"].isin(row_of)
    rows = readings.loc[in_period, "meter_id"].map(row_of).to_numpy(dtype=np.int64)
    cols = offsets[in_period].to_numpy(dtype=np.int64)
    grid[rows, cols] = readings.loc[in_period, "voltage"].to_numpy()
    # non-finite readings count as missing
    grid[~np.isfinite(grid)] = np.nan

    series = tuple(
        MeterSeries(
            meter_id=meter_id,
            period_id=period_id,
            start_time=start,
            values=grid[i],
        )
        for i, meter_id in enumerate(meter_ids)
    )
    dataset = FeederDataset(
        feeder_id=feeder_id,
        period_id=period_id,
        series=series,
        topology=topology.restricted(meter_ids),
    )
    incomplete = sum(not s.is_complete for s in series)
    logger.info(
        f"Feeder {feeder_id} {period_id}: {len(series)} meters, "
        f"{hours} hours, {incomplete} incomplete"
    )
    return dataset


def load_study(
    readings_path: Union[str, Path],
    topology_path: Union[str, Path],
    feeder_id: str,
    period_ids: Sequence[str],
) -> FeederStudy:
    """Load every listed period of one feeder, parsing each file once"""
    topology = load_topology(topology_path)
    readings = read_readings(readings_path)

    unknown = ~readings["meter_id"].isin(topology.meter_to_transformer)
    if unknown.any():
        line = _first_line(readings, unknown)
        meter_id = readings.loc[unknown, "meter_id"].iloc[0]
        raise TopologyError(
            f"{readings_path}:{line}: meter {meter_id} is not in the topology file"
        )
    if not topology.feeder_meters(feeder_id):
        raise TopologyError(f"feeder {feeder_id} has no meters in the topology file")

    datasets = {
        period_id: build_dataset(readings, topology, feeder_id, period_id)
        for period_id in period_ids
    }
    return FeederStudy(feeder_id=feeder_id, datasets=datasets)


def load_readings(
    readings_path: Union[str, Path],
    topology_path: Union[str, Path],
    feeder_id: str,
    period_id: str,
) -> FeederDataset:
    """All meters of a feeder for one period, un-normalized, missing hours as NaN"""
    return load_study(readings_path, topology_path, feeder_id, [period_id])[period_id]


def complete_meters(datasets: Iterable[FeederDataset]) -> List[str]:
    """Meters complete in every dataset, in the first dataset's order"""
    datasets = list(datasets)
    if not datasets:
        return []
    keep = None
    for dataset in datasets:
        ids = {s.meter_id for s in dataset.series if s.is_complete}
        keep = ids if keep is None else keep & ids
    return [m for m in datasets[0].meter_ids if m in keep]


def filter_complete(
    data: Union[FeederDataset, FeederStudy],
    periods: Optional[Sequence[str]] = None,
) -> Union[FeederDataset, FeederStudy]:
    """
    Keep only meters with a complete series in every listed period.

    Accepts one dataset or a whole study; ``periods`` defaults to every period
    held. Retained meters keep their order and an empty result is valid.
    """
    study = (
        FeederStudy(feeder_id=data.feeder_id, datasets={data.period_id: data})
        if isinstance(data, FeederDataset)
        else data
    )
    periods = list(study.period_ids if periods is None else periods)
    unknown = [p for p in periods if p not in study.datasets]
    if unknown:
        raise ParameterError(f"no data loaded for periods {unknown}")

    keep = set(complete_meters(study.datasets[p] for p in periods))
    filtered = {
        period_id: dataset.with_series(s for s in dataset.series if s.meter_id in keep)
        for period_id, dataset in study.datasets.items()
    }
    dropped = len(next(iter(study.datasets.values()), ())) - len(keep)
    logger.info(
        f"Completeness filter over {periods}: kept {len(keep)}, dropped {dropped}"
    )
    if isinstance(data, FeederDataset):
        return filtered[data.period_id]
    return FeederStudy(feeder_id=study.feeder_id, datasets=filtered)


def normalize(series: MeterSeries) -> MeterSeries:
    """Divide every sample by the series mean"""
    mean = float(np.mean(series.values))
    if not np.isfinite(mean) or mean == 0.0:
        raise DegenerateSeriesError(
            f"meter {series.meter_id} {series.period_id}: cannot normalize by mean {mean!r}"
        )
    return series.with_values(series.values / mean)


def normalize_dataset(dataset: FeederDataset) -> FeederDataset:
    return dataset.with_series(normalize(s) for s in dataset.series)
