"""Transformer purity and cross-period stability of cluster assignments"""

import re
from itertools import permutations
from typing import Dict, List, Mapping, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import AlignmentError
from .logging_config import get_logger
from .schemas.clustering import ClusterAssignment, label_sort_key
from .schemas.reports import PurityReport, StabilityReport
from .schemas.series import Topology

logger = get_logger(__name__)

# k! permutations are searched exhaustively up to this many labels
MAX_EXHAUSTIVE_LABELS = 6


def natural_key(value: str):
    """Sort "T2" before "T10" """
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", value)]


def transformer_purity(
    assignment: ClusterAssignment, topology: Topology
) -> PurityReport:
    """Transformer x cluster counts and the majority-label purity"""
    labels = assignment.label_set
    table: Dict[str, Dict[str, int]] = {}
    for meter_id, label in assignment.labels.items():
        transformer_id = topology.transformer_of(meter_id)
        row = table.setdefault(transformer_id, {lab: 0 for lab in labels})
        row[label] += 1

    transformers = sorted(table, key=natural_key)
    table = {t: table[t] for t in transformers}
    majority = {}
    majority_total = 0
    impure = []
    for transformer_id, row in table.items():
        # ties go to the earlier label
        top = max(labels, key=lambda lab, row=row: (row[lab], -labels.index(lab)))
        majority[transformer_id] = top
        majority_total += row[top]
        if sum(1 for count in row.values() if count) > 1:
            impure.append(transformer_id)

    total = len(assignment.labels)
    report = PurityReport(
        period_id=assignment.period_id,
        labels=labels,
        transformers=transformers,
        table=table,
        column_totals={lab: sum(row[lab] for row in table.values()) for lab in labels},
        total=total,
        majority=majority,
        impure_transformers=impure,
        purity=majority_total / total if total else 1.0,
    )
    logger.info(
        f"Purity {assignment.period_id}: {report.purity:.4f} "
        f"({len(impure)} of {len(transformers)} transformers split)"
    )
    return report


def _common_meters(a: ClusterAssignment, b: ClusterAssignment) -> List[str]:
    common = [m for m in a.labels if m in b.labels]
    if not common:
        raise AlignmentError("assignments share no meters")
    return common


def _agreement_counts(
    a: ClusterAssignment, b: ClusterAssignment, labels: List[str], common: List[str]
) -> np.ndarray:
    """counts[i, j] = meters labeled labels[i] in a and labels[j] in b"""
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for meter_id in common:
        counts[index[a.labels[meter_id]], index[b.labels[meter_id]]] += 1
    return counts


def align_labels(a: ClusterAssignment, b: ClusterAssignment) -> Dict[str, str]:
    """
    Relabeling of ``b`` that puts the most common meters on the diagonal.

    Returns b-label -> a-label. Up to six labels every permutation is tried
    and ties go to the lexicographically smallest one; beyond that an exact
    assignment solver is used.
    """
    common = _common_meters(a, b)
    labels = sorted(set(a.labels.values()) | set(b.labels.values()), key=label_sort_key)
    counts = _agreement_counts(a, b, labels, common)
    size = len(labels)

    if size <= MAX_EXHAUSTIVE_LABELS:
        best: Tuple[int, ...] = tuple(range(size))
        best_score = -1
        # permutations() yields in lexicographic order, so ">" keeps the first tie
        for perm in permutations(range(size)):
            score = int(counts[perm, range(size)].sum())
            if score > best_score:
                best, best_score = perm, score
    else:
        rows, cols = linear_sum_assignment(counts, maximize=True)
        image = dict(zip(cols, rows))
        best = tuple(image[j] for j in range(size))

    mapping = {labels[j]: labels[best[j]] for j in range(size)}
    return mapping


def stability(a: ClusterAssignment, b: ClusterAssignment) -> StabilityReport:
    """Cross tabulation of two periods' labels over their common meters"""
    common = _common_meters(a, b)
    alignment = align_labels(a, b)
    labels = sorted(set(alignment.values()) | set(a.labels.values()), key=label_sort_key)

    cross_tab = {row: {col: 0 for col in labels} for row in labels}
    unstable = []
    for meter_id in common:
        first = a.labels[meter_id]
        second = alignment[b.labels[meter_id]]
        cross_tab[first][second] += 1
        if first != second:
            unstable.append(meter_id)

    stable = len(common) - len(unstable)
    report = StabilityReport(
        first_period=a.period_id,
        second_period=b.period_id,
        labels=labels,
        cross_tab=cross_tab,
        alignment=alignment,
        common_meters=len(common),
        stable_fraction=stable / len(common),
        unstable_meters=unstable,
        only_in_first=[m for m in a.labels if m not in b.labels],
        only_in_second=[m for m in b.labels if m not in a.labels],
    )
    logger.info(
        f"Stability {a.period_id} -> {b.period_id}: {report.stable_fraction:.4f} "
        f"over {len(common)} meters, {len(unstable)} unstable"
    )
    return report


def agreement(assignment: ClusterAssignment, truth: Mapping[str, str]) -> float:
    """Fraction of meters matching a reference labeling after alignment"""
    reference = ClusterAssignment(
        labels={m: str(truth[m]) for m in assignment.labels if m in truth},
        k=max(1, len(set(truth.values()))),
    )
    return stability(reference, assignment).stable_fraction
