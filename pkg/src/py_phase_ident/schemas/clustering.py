"""Dendrogram and cluster assignment models"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Merge(BaseModel):
    model_config = ConfigDict(frozen=True)

    left: int = Field(..., ge=0)
    right: int = Field(..., ge=0)
    height: float = Field(..., ge=0)
    size: int = Field(..., ge=2)


class Dendrogram(BaseModel):
    """Agglomerative merge tree; leaves are 0..n-1, merge i creates node n+i"""

    model_config = ConfigDict(frozen=True)

    n_leaves: int = Field(..., ge=1)
    merges: Tuple[Merge, ...] = ()
    leaf_order: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_shape(self):
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError(
                f"{self.n_leaves} leaves need {self.n_leaves - 1} merges, "
                f"got {len(self.merges)}"
            )
        if self.leaf_order and len(self.leaf_order) != self.n_leaves:
            raise ValueError("leaf_order must name every leaf")
        return self

    @property
    def heights(self) -> List[float]:
        return [m.height for m in self.merges]

    def to_linkage_matrix(self) -> np.ndarray:
        """(n-1) x 4 array of left, right, height, size"""
        return np.array(
            [[m.left, m.right, m.height, m.size] for m in self.merges],
            dtype=np.float64,
        ).reshape(-1, 4)


class ClusterAssignment(BaseModel):
    """Meter → cluster label for one period"""

    model_config = ConfigDict(frozen=True)

    labels: Dict[str, str] = Field(..., description="meter_id -> cluster label")
    k: int = Field(..., ge=1)
    period_id: Optional[str] = None

    @property
    def meter_ids(self) -> List[str]:
        return list(self.labels)

    @property
    def label_set(self) -> List[str]:
        return sorted(set(self.labels.values()), key=label_sort_key)

    def clusters(self) -> Dict[str, List[str]]:
        """Label → meters, labels in letter order"""
        grouped: Dict[str, List[str]] = {label: [] for label in self.label_set}
        for meter_id, label in self.labels.items():
            grouped[label].append(meter_id)
        return grouped

    def sizes(self) -> Dict[str, int]:
        return {label: len(m) for label, m in self.clusters().items()}


def cluster_label(index: int) -> str:
    """0 -> A, 25 -> Z, 26 -> AA"""
    label = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


def label_sort_key(label: str):
    return (len(label), label)
