"""End-to-end clustering of a feeder: ingest, compress, link, cut, validate"""

import hashlib
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from .clustering import cut, standardize_features, ward_linkage
from .embedding import classical_mds, euclidean_distances
from .errors import EmptyDatasetError, ParameterError
from .exports import (
    write_assignment,
    write_dendrogram,
    write_embedding,
    write_features,
    write_leaves,
    write_purity,
    write_stability,
)
from .ingestion import filter_complete, load_study, normalize_dataset
from .logging_config import get_logger, log_run_event
from .schemas.clustering import ClusterAssignment, Dendrogram
from .schemas.config import RunConfig
from .schemas.reports import Embedding2D, PurityReport, StabilityReport
from .schemas.series import FeederDataset, FeederStudy
from .schemas.spectrum import CompressedSpectrum, CompressionMask
from .spectral import compress, dft_real, feature_matrix, feature_names
from .validation import stability, transformer_purity

logger = get_logger(__name__)


class PeriodResult(BaseModel):
    """Everything computed for one period of a feeder"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    period_id: str
    meter_ids: List[str]
    compressed: List[CompressedSpectrum]
    harmonics: List[int]
    features: np.ndarray
    dendrogram: Dendrogram
    assignment: ClusterAssignment

    @property
    def feature_columns(self) -> List[str]:
        return feature_names(self.harmonics)


def compress_dataset(
    dataset: FeederDataset, mask_text: str = "daily"
) -> List[CompressedSpectrum]:
    """Normalize, transform and mask every meter of a dataset"""
    normalized = normalize_dataset(dataset)
    mask = CompressionMask.parse(mask_text, n_samples=normalized.n_samples)
    compressed = [compress(dft_real(s), mask) for s in normalized.series]
    logger.info(
        f"Compressed {len(compressed)} meters of {dataset.period_id} with {mask.describe()}"
    )
    return compressed


def cluster_dataset(
    dataset: FeederDataset,
    mask_text: str = "daily",
    k: int = 3,
    standardize: bool = False,
) -> PeriodResult:
    """Run compress → features → Ward → cut on one period's complete meters"""
    if not len(dataset):
        raise EmptyDatasetError(
            f"no complete meters for feeder {dataset.feeder_id} in {dataset.period_id}"
        )
    if k > len(dataset):
        raise ParameterError(f"k={k} exceeds the {len(dataset)} available meters")

    compressed = compress_dataset(dataset, mask_text)
    matrix, harmonics = feature_matrix(compressed)
    features = standardize_features(matrix) if standardize else matrix

    dendrogram = ward_linkage(features, leaf_ids=dataset.meter_ids)
    assignment = cut(dendrogram, k, period_id=dataset.period_id)
    log_run_event(
        f"Clustered {len(dataset)} meters of {dataset.feeder_id} {dataset.period_id} "
        f"into {assignment.sizes()}"
    )
    return PeriodResult(
        period_id=dataset.period_id,
        meter_ids=dataset.meter_ids,
        compressed=compressed,
        harmonics=harmonics,
        features=features,
        dendrogram=dendrogram,
        assignment=assignment,
    )


def cluster_study(
    study: FeederStudy,
    mask_text: str = "daily",
    k: int = 3,
    standardize: bool = False,
) -> Dict[str, PeriodResult]:
    """Drop meters incomplete in any period, then cluster each period"""
    filtered = filter_complete(study)
    return {
        period_id: cluster_dataset(dataset, mask_text, k, standardize)
        for period_id, dataset in filtered.datasets.items()
    }


def load_config_study(config: RunConfig) -> FeederStudy:
    return load_study(config.readings, config.topology, config.feeder, config.periods)


def embed_result(result: PeriodResult) -> Embedding2D:
    return classical_mds(euclidean_distances(result.features), meter_ids=result.meter_ids)


def validate_study(
    study: FeederStudy, results: Dict[str, PeriodResult]
) -> Tuple[Dict[str, PurityReport], Optional[StabilityReport]]:
    """Purity per period and stability between the first two periods"""
    purity = {
        period_id: transformer_purity(result.assignment, study[period_id].topology)
        for period_id, result in results.items()
    }
    report = None
    if len(results) >= 2:
        first, second = list(results.values())[:2]
        report = stability(first.assignment, second.assignment)
    return purity, report


def write_period(out_dir: Path, result: PeriodResult) -> None:
    """assignment.csv, dendrogram.csv, leaves.csv and features.csv of one period"""
    period_dir = out_dir / result.period_id
    write_assignment(period_dir / "assignment.csv", result.assignment)
    write_dendrogram(period_dir / "dendrogram.csv", result.dendrogram)
    write_leaves(period_dir / "leaves.csv", result.dendrogram)
    write_features(
        period_dir / "features.csv",
        result.meter_ids,
        result.features,
        result.feature_columns,
    )


def write_period_embedding(
    out_dir: Path, result: PeriodResult, embedding: Embedding2D
) -> None:
    write_embedding(out_dir / result.period_id, embedding, result.assignment)


def write_validation(
    out_dir: Path,
    purity: Dict[str, PurityReport],
    report: Optional[StabilityReport],
) -> None:
    for period_id, purity_report in purity.items():
        write_purity(out_dir, f"purity_{period_id}", purity_report)
    if report is not None:
        write_stability(out_dir, "stability", report)


def file_digest(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def config_echo(config: RunConfig, exclude: Sequence[str] = ("out",)) -> dict:
    """Config as written to manifests; the output path is left out"""
    echo = config.model_dump(mode="json", exclude=set(exclude))
    echo["inputs_sha256"] = {
        "readings": file_digest(config.readings),
        "topology": file_digest(config.topology),
    }
    return echo
