"""Pydantic models for the pipeline's domain types"""

from .clustering import ClusterAssignment, Dendrogram, Merge, cluster_label
from .config import RunConfig, SynthConfig, load_model
from .reports import Embedding2D, PurityReport, StabilityReport
from .series import FeederDataset, FeederStudy, MeterSeries, Topology
from .spectrum import CompressedSpectrum, CompressionMask, HarmonicSpectrum, MaskKind

__all__ = [
    "MeterSeries",
    "Topology",
    "FeederDataset",
    "FeederStudy",
    "HarmonicSpectrum",
    "CompressionMask",
    "CompressedSpectrum",
    "MaskKind",
    "Dendrogram",
    "Merge",
    "ClusterAssignment",
    "cluster_label",
    "PurityReport",
    "StabilityReport",
    "Embedding2D",
    "RunConfig",
    "SynthConfig",
    "load_model",
]
