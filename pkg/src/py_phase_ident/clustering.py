"""Ward agglomerative clustering of meter feature vectors"""

from typing import List, Optional, Sequence

import numpy as np

from .errors import NumericError, ParameterError, SizeError
from .logging_config import get_logger
from .schemas.clustering import ClusterAssignment, Dendrogram, Merge, cluster_label

logger = get_logger(__name__)


def _as_matrix(features) -> np.ndarray:
    try:
        matrix = np.asarray(features, dtype=np.float64)
    except ValueError as e:
        raise SizeError(f"feature vectors differ in dimension: {e}") from e
    if matrix.ndim == 1 and matrix.size == 0:
        matrix = matrix.reshape(0, 0)
    if matrix.ndim != 2:
        raise SizeError("features must be a list of equal-length vectors")
    return matrix


def pairwise_sq_distances(features) -> np.ndarray:
    """Squared Euclidean distances; symmetric with an exact zero diagonal"""
    matrix = _as_matrix(features)
    if matrix.shape[0] < 1:
        raise SizeError("need at least one feature vector")
    diff = matrix[:, None, :] - matrix[None, :, :]
    distances = np.sum(diff * diff, axis=-1)
    np.fill_diagonal(distances, 0.0)
    return distances


def standardize_features(features) -> np.ndarray:
    """Z-score each column; zero-variance columns are only centered"""
    matrix = _as_matrix(features)
    centered = matrix - matrix.mean(axis=0)
    scale = matrix.std(axis=0)
    scale[scale == 0.0] = 1.0
    return centered / scale


def ward_linkage(
    features, leaf_ids: Optional[Sequence[str]] = None
) -> Dendrogram:
    """
    Ward minimum-variance merge tree via the Lance-Williams update.

    Squared Ward distances are updated as

        d(i+j, k)^2 = ((n_i + n_k) d(i,k)^2 + (n_j + n_k) d(j,k)^2
                       - n_k d(i,j)^2) / (n_i + n_j + n_k)

    and each merge height is the (unsquared) Ward distance. Ties go to the
    smallest (left, right) node-id pair.
    """
    matrix = _as_matrix(features)
    n = matrix.shape[0]
    if n < 2:
        raise SizeError(f"need at least 2 feature vectors, got {n}")
    if not np.all(np.isfinite(matrix)):
        raise NumericError("feature matrix contains non-finite values")
    if leaf_ids is not None and len(leaf_ids) != n:
        raise SizeError(f"{len(leaf_ids)} leaf ids for {n} feature vectors")

    d2 = pairwise_sq_distances(matrix)
    np.fill_diagonal(d2, np.inf)
    node = np.arange(n)  # node id held by each slot
    size = np.ones(n)
    active = np.ones(n, dtype=bool)

    merges: List[Merge] = []
    for step in range(n - 1):
        live = np.flatnonzero(active)
        sub = d2[np.ix_(live, live)]
        best = sub.min()
        rows, cols = np.nonzero(sub == best)
        pairs = sorted(
            (min(node[live[r]], node[live[c]]), max(node[live[r]], node[live[c]]), r, c)
            for r, c in zip(rows, cols)
            if r != c
        )
        left, right, r, c = pairs[0]
        i, j = live[r], live[c]

        n_i, n_j = size[i], size[j]
        others = live[(live != i) & (live != j)]
        n_k = size[others]
        updated = (
            (n_i + n_k) * d2[i, others]
            + (n_j + n_k) * d2[j, others]
            - n_k * best
        ) / (n_i + n_j + n_k)
        # rounding can push a tiny distance below zero
        updated = np.maximum(updated, 0.0)

        # the merged cluster takes slot i
        d2[i, others] = updated
        d2[others, i] = updated
        active[j] = False
        d2[j, :] = np.inf
        d2[:, j] = np.inf
        size[i] = n_i + n_j
        node[i] = n + step

        merges.append(
            Merge(
                left=int(left),
                right=int(right),
                height=float(np.sqrt(best)),
                size=int(size[i]),
            )
        )

    dendrogram = Dendrogram(
        n_leaves=n,
        merges=tuple(merges),
        leaf_order=tuple(leaf_ids) if leaf_ids is not None else (),
    )
    logger.debug(
        f"Ward linkage over {n} leaves, top heights {dendrogram.heights[-3:]}"
    )
    return dendrogram


def cut(
    dendrogram: Dendrogram, k: int, period_id: Optional[str] = None
) -> ClusterAssignment:
    """
    Undo the last k-1 merges; components become clusters.

    Clusters are lettered A, B, C, ... in order of their smallest leaf index.
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ParameterError(f"k must be between 1 and {n}, got {k}")

    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for step, merge in enumerate(dendrogram.merges[: n - k]):
        new = n + step
        parent[find(merge.left)] = new
        parent[find(merge.right)] = new

    letters = {}
    leaf_labels = []
    for leaf in range(n):
        root = find(leaf)
        if root not in letters:
            letters[root] = cluster_label(len(letters))
        leaf_labels.append(letters[root])

    names = dendrogram.leaf_order or tuple(str(i) for i in range(n))
    assignment = ClusterAssignment(
        labels=dict(zip(names, leaf_labels)), k=k, period_id=period_id
    )
    logger.info(f"Cut into {k} clusters: {assignment.sizes()}")
    return assignment
