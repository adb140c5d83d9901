import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage

from py_phase_ident.clustering import (
    cut,
    pairwise_sq_distances,
    standardize_features,
    ward_linkage,
)
from py_phase_ident.errors import NumericError, ParameterError, SizeError
from py_phase_ident.schemas.clustering import cluster_label


def naive_ward(features):
    """Recompute every Ward distance from cluster centroids at each step"""
    n = len(features)
    clusters = {i: [i] for i in range(n)}
    merges = []
    for step in range(n - 1):
        best = None
        ids = sorted(clusters)
        for x, i in enumerate(ids):
            for j in ids[x + 1 :]:
                a, b = features[clusters[i]], features[clusters[j]]
                na, nb = len(a), len(b)
                gap = a.mean(axis=0) - b.mean(axis=0)
                height = np.sqrt(2.0 * na * nb / (na + nb) * gap @ gap)
                key = (height, i, j)
                if best is None or key < best:
                    best = key
        height, i, j = best
        clusters[n + step] = clusters.pop(i) + clusters.pop(j)
        merges.append((i, j, height, len(clusters[n + step])))
    return merges


def test_ward_matches_naive_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 51))
        features = rng.standard_normal((n, 12))

        dendrogram = ward_linkage(features)
        expected = naive_ward(features)

        assert [(m.left, m.right, m.size) for m in dendrogram.merges] == [
            (i, j, size) for i, j, _, size in expected
        ]
        assert np.allclose(dendrogram.heights, [h for _, _, h, _ in expected], atol=1e-9)


def test_ward_heights_agree_with_scipy(rng):
    features = rng.standard_normal((40, 12))

    ours = ward_linkage(features).to_linkage_matrix()
    reference = linkage(features, method="ward")

    assert np.allclose(ours[:, 2], reference[:, 2], atol=1e-9)
    assert [frozenset(row[:2]) for row in ours] == [
        frozenset(row[:2]) for row in reference
    ]


def test_heights_are_monotone(rng):
    heights = ward_linkage(rng.standard_normal((30, 4))).heights

    assert all(a <= b + 1e-12 for a, b in zip(heights, heights[1:]))


def test_two_points():
    dendrogram = ward_linkage([[0.0, 0.0], [3.0, 4.0]])

    (merge,) = dendrogram.merges
    assert (merge.left, merge.right, merge.size) == (0, 1, 2)
    assert merge.height == pytest.approx(5.0)


def test_equal_distances_break_ties_on_node_ids():
    dendrogram = ward_linkage([[0.0], [1.0], [2.0]])

    assert (dendrogram.merges[0].left, dendrogram.merges[0].right) == (0, 1)
    assert (dendrogram.merges[1].left, dendrogram.merges[1].right) == (2, 3)


def test_duplicate_points_merge_at_zero():
    dendrogram = ward_linkage([[1.0, 1.0], [1.0, 1.0], [5.0, 5.0]])

    assert dendrogram.merges[0].height == 0.0
    assert dendrogram.merges[0].size == 2


def test_ward_rejects_bad_input():
    with pytest.raises(SizeError):
        ward_linkage([[1.0, 2.0]])
    with pytest.raises(SizeError):
        ward_linkage([])
    with pytest.raises(NumericError):
        ward_linkage([[1.0], [np.nan], [2.0]])
    with pytest.raises(SizeError):
        ward_linkage([[1.0], [2.0]], leaf_ids=["only-one"])


@pytest.fixture
def two_groups():
    features = [[0.0], [0.1], [10.0], [10.1]]
    return ward_linkage(features, leaf_ids=["M1", "M2", "M3", "M4"])


def test_cut_two_groups(two_groups):
    assignment = cut(two_groups, 2, period_id="2021-06")

    assert assignment.labels == {"M1": "A", "M2": "A", "M3": "B", "M4": "B"}
    assert assignment.period_id == "2021-06"
    assert assignment.sizes() == {"A": 2, "B": 2}


def test_cut_extremes(two_groups):
    assert set(cut(two_groups, 1).labels.values()) == {"A"}
    assert list(cut(two_groups, 4).labels.values()) == ["A", "B", "C", "D"]


@pytest.mark.parametrize("k", [0, 5])
def test_cut_rejects_k_out_of_range(two_groups, k):
    with pytest.raises(ParameterError):
        cut(two_groups, k)


def test_cut_letters_follow_first_leaf():
    features = [[10.0], [0.0], [10.2], [0.1], [20.0]]
    assignment = cut(ward_linkage(features, leaf_ids=list("vwxyz")), 3)

    assert assignment.labels == {"v": "A", "w": "B", "x": "A", "y": "B", "z": "C"}


def test_partition_is_invariant_to_input_order(rng):
    centers = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]])
    features = np.vstack([c + 0.3 * rng.standard_normal((6, 2)) for c in centers])
    ids = [f"M{i}" for i in range(len(features))]
    order = rng.permutation(len(features))

    def groups(matrix, names):
        assignment = cut(ward_linkage(matrix, leaf_ids=names), 3)
        return {frozenset(members) for members in assignment.clusters().values()}

    assert groups(features, ids) == groups(features[order], [ids[i] for i in order])


def test_linkage_matrix_shape(rng):
    matrix = ward_linkage(rng.standard_normal((6, 3))).to_linkage_matrix()

    assert matrix.shape == (5, 4)
    assert matrix[-1, 3] == 6


def test_pairwise_sq_distances_symmetric(rng):
    features = rng.standard_normal((7, 5))

    d2 = pairwise_sq_distances(features)

    assert np.array_equal(d2, d2.T)
    assert np.all(np.diag(d2) == 0.0)
    assert d2[1, 4] == pytest.approx(np.sum((features[1] - features[4]) ** 2))


def test_pairwise_sq_distances_match_double_loop(rng):
    features = rng.standard_normal((10, 12))
    expected = np.zeros((10, 10))
    for i in range(10):
        for j in range(10):
            if i != j:
                gap = features[i] - features[j]
                expected[i, j] = np.sum(gap * gap)

    assert np.array_equal(pairwise_sq_distances(features), expected)


def test_standardize_features():
    matrix = standardize_features([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])

    assert np.allclose(matrix[:, 0].mean(), 0.0)
    assert np.allclose(matrix[:, 0].std(), 1.0)
    assert np.all(matrix[:, 1] == 0.0)


@pytest.mark.parametrize(
    "index, label", [(0, "A"), (2, "C"), (25, "Z"), (26, "AA"), (27, "AB"), (52, "BA")]
)
def test_cluster_label(index, label):
    assert cluster_label(index) == label
