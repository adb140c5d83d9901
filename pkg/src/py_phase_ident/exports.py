"""Artifact files: CSV tables, JSON reports, text reports and run manifests"""

import json
import os
import platform
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from jinja2 import Environment, PackageLoader, StrictUndefined
from pydantic import BaseModel

from .errors import ConfigError, ParseError
from .logging_config import get_logger
from .schemas.clustering import ClusterAssignment, Dendrogram
from .schemas.reports import Embedding2D, PurityReport, StabilityReport
from .schemas.series import FeederStudy, Topology
from .schemas.spectrum import HarmonicSpectrum
from .settings import settings

logger = get_logger(__name__)

templates = Environment(
    loader=PackageLoader("py_phase_ident", "templates"),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


def fmt(value: float, digits: Optional[int] = None) -> str:
    return f"{value:.{digits or settings.float_digits}g}"


def _float_format() -> str:
    return f"%.{settings.float_digits}g"


def _rounded(data: Any) -> Any:
    if isinstance(data, float):
        return float(fmt(data))
    if isinstance(data, dict):
        return {k: _rounded(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [_rounded(v) for v in data]
    return data


@contextmanager
def staged_output(out_dir: Path, inputs: Sequence[Path] = ()) -> Iterator[Path]:
    """
    Yield a scratch directory whose entries are moved into ``out_dir`` on success.

    Only the run's own top-level entries are replaced, each with ``os.replace``;
    anything else already in ``out_dir`` is left alone. On any error the
    scratch directory is removed and ``out_dir`` is left as it was. An entry
    that would overwrite one of ``inputs`` raises ``ConfigError``.
    """
    out_dir = Path(out_dir)
    created = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".staged.", dir=out_dir))
    try:
        yield scratch
        _check_inputs(out_dir, [entry.name for entry in scratch.iterdir()], inputs)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        if created:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise

    backup = Path(tempfile.mkdtemp(prefix=".previous.", dir=out_dir))
    try:
        for entry in sorted(scratch.iterdir()):
            target = out_dir / entry.name
            if target.exists():
                os.replace(target, backup / entry.name)
            os.replace(entry, target)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
        shutil.rmtree(backup, ignore_errors=True)
    logger.debug(f"Published {out_dir}")


def _check_inputs(out_dir: Path, names: Sequence[str], inputs: Sequence[Path]) -> None:
    resolved = [Path(p).resolve() for p in inputs]
    for name in names:
        target = (out_dir / name).resolve()
        for path in resolved:
            if path == target or target in path.parents:
                raise ConfigError(f"output {target} would overwrite input {path}")


def write_table(path: Path, frame: pd.DataFrame) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=_float_format(), lineterminator="\n")


def write_json(path: Path, data: Any) -> None:
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_rounded(data), indent=2) + "\n", encoding="utf-8")


def _read_table(path: Path, columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise ParseError(f"unreadable table: {e}", path=path) from e
    frame.columns = [c.strip() for c in frame.columns]
    if columns is not None and list(frame.columns) != list(columns):
        raise ParseError(
            f"expected header {','.join(columns)}, got {','.join(frame.columns)}",
            line=1,
            path=path,
        )
    return frame


def _numeric_block(frame: pd.DataFrame, path: Path) -> np.ndarray:
    values = frame.apply(pd.to_numeric, errors="coerce")
    bad = values.isna().any(axis=1).to_numpy()
    if bad.any():
        raise ParseError("non-numeric value", line=int(np.argmax(bad)) + 2, path=path)
    return values.to_numpy(dtype=np.float64)


# Assignments


def write_assignment(path: Path, assignment: ClusterAssignment) -> None:
    frame = pd.DataFrame(
        {"meter_id": list(assignment.labels), "cluster": list(assignment.labels.values())}
    )
    write_table(path, frame)


def read_assignment(path: Path, period_id: Optional[str] = None) -> ClusterAssignment:
    """Parse ``meter_id,cluster``; the period defaults to the file's name"""
    path = Path(path)
    frame = _read_table(path, ["meter_id", "cluster"])
    blank = (frame == "").any(axis=1).to_numpy()
    if blank.any():
        raise ParseError("empty field", line=int(np.argmax(blank)) + 2, path=path)
    duplicated = frame["meter_id"].duplicated().to_numpy()
    if duplicated.any():
        raise ParseError(
            "meter listed twice", line=int(np.argmax(duplicated)) + 2, path=path
        )
    if period_id is None:
        period_id = path.parent.name if path.stem == "assignment" else path.stem
    labels = dict(zip(frame["meter_id"], frame["cluster"]))
    return ClusterAssignment(
        labels=labels, k=max(1, len(set(labels.values()))), period_id=period_id
    )


# Dendrogram


def write_dendrogram(path: Path, dendrogram: Dendrogram) -> None:
    n = dendrogram.n_leaves
    frame = pd.DataFrame(
        {
            "merge_index": [n + i for i in range(len(dendrogram.merges))],
            "left": [m.left for m in dendrogram.merges],
            "right": [m.right for m in dendrogram.merges],
            "height": [m.height for m in dendrogram.merges],
            "size": [m.size for m in dendrogram.merges],
        }
    )
    write_table(path, frame)


def write_leaves(path: Path, dendrogram: Dendrogram) -> None:
    frame = pd.DataFrame(
        {"leaf": range(dendrogram.n_leaves), "meter_id": list(dendrogram.leaf_order)}
    )
    write_table(path, frame)


# Features and distances


def write_features(
    path: Path, meter_ids: Sequence[str], matrix: np.ndarray, names: Sequence[str]
) -> None:
    frame = pd.DataFrame(matrix, columns=list(names))
    frame.insert(0, "meter_id", list(meter_ids))
    write_table(path, frame)


def read_features(path: Path) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    frame = _read_table(path)
    if not len(frame.columns) or frame.columns[0] != "meter_id":
        raise ParseError("first column must be meter_id", line=1, path=path)
    return list(frame["meter_id"]), _numeric_block(frame.iloc[:, 1:], path)


def write_distances(path: Path, meter_ids: Sequence[str], matrix: np.ndarray) -> None:
    write_features(path, meter_ids, matrix, meter_ids)


def read_distances(path: Path) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    meter_ids, matrix = read_features(path)
    header = list(_read_table(path).columns[1:])
    if header != meter_ids:
        raise ParseError("column ids must match row ids", line=1, path=path)
    return meter_ids, matrix


# Embedding


def write_coordinates(
    path: Path, embedding: Embedding2D, assignment: Optional[ClusterAssignment] = None
) -> None:
    meter_ids = list(embedding.coords)
    labels = assignment.labels if assignment is not None else {}
    frame = pd.DataFrame(
        {
            "meter_id": meter_ids,
            "x": [embedding.coords[m][0] for m in meter_ids],
            "y": [embedding.coords[m][1] for m in meter_ids],
            "cluster": [labels.get(m, "") for m in meter_ids],
        }
    )
    write_table(path, frame)


def write_embedding(
    out_dir: Path, embedding: Embedding2D, assignment: Optional[ClusterAssignment] = None
) -> None:
    """coordinates.csv plus embedding.json with stress, rank and eigenvalues"""
    write_coordinates(out_dir / "coordinates.csv", embedding, assignment)
    write_json(
        out_dir / "embedding.json",
        {
            "stress": embedding.stress,
            "rank": embedding.rank,
            "eigenvalues": list(embedding.eigenvalues),
        },
    )


# Spectra


def write_spectrum(path: Path, spectrum: HarmonicSpectrum) -> None:
    frame = pd.DataFrame(
        {
            "n": np.arange(1, spectrum.n_harmonics + 1),
            "a": spectrum.a,
            "b": spectrum.b,
        }
    )
    write_table(path, frame)


def write_magnitudes(
    path: Path, meter_ids: Sequence[str], magnitudes: np.ndarray
) -> None:
    """One row per harmonic, one column per meter"""
    frame = pd.DataFrame(np.asarray(magnitudes).T, columns=list(meter_ids))
    frame.insert(0, "n", np.arange(1, frame.shape[0] + 1))
    write_table(path, frame)


def write_error_curve(path: Path, curves: Mapping[str, Sequence[Tuple[int, float]]]) -> None:
    rows = [
        {"meter_id": m, "pairs": k, "coefficients": 2 * k, "error": e}
        for m, curve in curves.items()
        for k, e in curve
    ]
    write_table(path, pd.DataFrame(rows, columns=["meter_id", "pairs", "coefficients", "error"]))


# Synthetic datasets


def write_readings(path: Path, study: FeederStudy, nominal_voltage: float = 1.0) -> None:
    """Readings CSV over every period; missing hours are left out"""
    frames = []
    for dataset in study.datasets.values():
        for series in dataset.series:
            stamps = pd.date_range(series.start_time, periods=series.n_samples, freq="h")
            keep = np.isfinite(series.values)
            frames.append(
                pd.DataFrame(
                    {
                        "meter_id": series.meter_id,
                        "timestamp": stamps[keep].strftime("%Y-%m-%dT%H:%M:%S"),
                        "voltage": series.values[keep] * nominal_voltage,
                    }
                )
            )
    frame = (
        pd.concat(frames, ignore_index=True)
        if frames
        else pd.DataFrame(columns=["meter_id", "timestamp", "voltage"])
    )
    write_table(path, frame)


def write_topology(path: Path, topology: Topology) -> None:
    meters = list(topology.meter_to_transformer)
    frame = pd.DataFrame(
        {
            "meter_id": meters,
            "transformer_id": [topology.meter_to_transformer[m] for m in meters],
            "feeder_id": [topology.meter_to_feeder[m] for m in meters],
        }
    )
    write_table(path, frame)


def write_ground_truth(path: Path, truth: Mapping[str, str]) -> None:
    write_table(
        path, pd.DataFrame({"meter_id": list(truth), "phase": list(truth.values())})
    )


def write_synthetic(
    study: FeederStudy,
    truth: Mapping[str, str],
    out_dir: Path,
    nominal_voltage: float = 1.0,
) -> None:
    """readings.csv, topology.csv and ground_truth.csv of a generated study"""
    out_dir = Path(out_dir)
    write_readings(out_dir / "readings.csv", study, nominal_voltage)
    write_topology(
        out_dir / "topology.csv", next(iter(study.datasets.values())).topology
    )
    write_ground_truth(out_dir / "ground_truth.csv", truth)


def read_ground_truth(path: Path) -> Dict[str, str]:
    frame = _read_table(Path(path), ["meter_id", "phase"])
    return dict(zip(frame["meter_id"], frame["phase"]))


# Reports


def render_purity(report: PurityReport) -> str:
    width = max([len("Transformer"), len("Total")] + [len(t) for t in report.transformers])
    cell = max([5] + [len(lab) + 1 for lab in report.labels])
    return templates.get_template("purity.txt.j2").render(
        report=report, width=width, cell=cell, fmt=fmt
    )


def render_stability(report: StabilityReport) -> str:
    cell = max([6] + [len(lab) + 1 for lab in report.labels])
    return templates.get_template("stability.txt.j2").render(
        report=report, cell=cell, fmt=fmt
    )


def write_purity(out_dir: Path, stem: str, report: PurityReport) -> None:
    write_json(out_dir / f"{stem}.json", report)
    (out_dir / f"{stem}.txt").write_text(render_purity(report), encoding="utf-8")


def write_stability(out_dir: Path, stem: str, report: StabilityReport) -> None:
    write_json(out_dir / f"{stem}.json", report)
    (out_dir / f"{stem}.txt").write_text(render_stability(report), encoding="utf-8")


def versions() -> Dict[str, str]:
    import scipy

    from . import __version__

    return {
        "py_phase_ident": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def write_manifest(path: Path, command: str, config: Mapping[str, Any], **extra) -> None:
    """Config echo plus library versions; no timestamps so reruns match byte for byte"""
    write_json(
        path,
        {"command": command, "config": dict(config), "versions": versions(), **extra},
    )
