import numpy as np
import pytest

from py_phase_ident.embedding import classical_mds, euclidean_distances
from py_phase_ident.errors import MatrixError


def recovered_distances(embedding):
    coords = np.array(list(embedding.coords.values()))
    return euclidean_distances(coords)


def test_right_triangle():
    distances = euclidean_distances([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    embedding = classical_mds(distances, meter_ids=["a", "b", "c"])

    assert list(embedding.coords) == ["a", "b", "c"]
    assert np.allclose(recovered_distances(embedding), distances, atol=1e-9)
    assert embedding.stress < 1e-9
    assert embedding.rank == 2


def test_planar_point_sets_are_recovered(rng):
    for n in (3, 10, 50, 100):
        points = rng.uniform(-5, 5, size=(n, 2))
        distances = euclidean_distances(points)

        embedding = classical_mds(distances)

        assert np.allclose(recovered_distances(embedding), distances, atol=1e-6)
        assert embedding.stress < 1e-6


def test_eigenvalues_match_dense_solver(rng):
    points = rng.standard_normal((12, 5))
    distances = euclidean_distances(points)
    n = len(points)
    centering = np.eye(n) - 1.0 / n
    gram = -0.5 * centering @ (distances**2) @ centering

    top = np.sort(np.linalg.eigvalsh(gram))[::-1][:2]
    embedding = classical_mds(distances)

    assert np.allclose(embedding.eigenvalues, top, rtol=1e-9)
    assert embedding.stress > 0


def test_axes_are_sign_normalized(rng):
    distances = euclidean_distances(rng.standard_normal((8, 3)))

    coords = np.array(list(classical_mds(distances).coords.values()))

    for axis in range(2):
        column = coords[:, axis]
        assert column[np.argmax(np.abs(column))] > 0


def test_zero_matrix_collapses_to_origin():
    embedding = classical_mds(np.zeros((4, 4)))

    assert embedding.rank == 0
    assert embedding.stress == 0.0
    assert all(xy == (0.0, 0.0) for xy in embedding.coords.values())


def test_collinear_points_pad_second_axis():
    distances = euclidean_distances([[0.0], [1.0], [3.0]])

    embedding = classical_mds(distances)

    assert embedding.rank == 1
    assert all(abs(y) == 0.0 for _, y in embedding.coords.values())
    assert np.allclose(recovered_distances(embedding), distances, atol=1e-9)


@pytest.mark.parametrize(
    "matrix",
    [
        np.zeros((2, 3)),
        np.array([[0.0, 1.0], [2.0, 0.0]]),
        np.array([[1.0, 1.0], [1.0, 0.0]]),
        np.array([[0.0, -1.0], [-1.0, 0.0]]),
        np.array([[0.0, np.inf], [np.inf, 0.0]]),
    ],
)
def test_rejects_invalid_matrices(matrix):
    with pytest.raises(MatrixError):
        classical_mds(matrix)


def test_meter_id_count_must_match():
    with pytest.raises(MatrixError):
        classical_mds(np.zeros((2, 2)), meter_ids=["only"])
