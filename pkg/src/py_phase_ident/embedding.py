"""Classical (Torgerson) scaling of meter distances onto the plane"""

from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh

from .clustering import pairwise_sq_distances
from .errors import MatrixError
from .logging_config import get_logger
from .schemas.reports import Embedding2D

logger = get_logger(__name__)

SYMMETRY_TOL = 1e-9


def euclidean_distances(features) -> np.ndarray:
    return np.sqrt(pairwise_sq_distances(features))


def _check_distances(distances) -> np.ndarray:
    d = np.asarray(distances, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MatrixError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise MatrixError("distance matrix contains non-finite entries")
    scale = max(1.0, float(np.abs(d).max(initial=0.0)))
    if not np.allclose(d, d.T, rtol=0.0, atol=SYMMETRY_TOL * scale):
        raise MatrixError("distance matrix is not symmetric")
    diagonal = np.diag(d)
    if np.any(diagonal < 0) or np.any(np.abs(diagonal) > SYMMETRY_TOL * scale):
        raise MatrixError("distance matrix diagonal must be zero")
    if np.any(d < 0):
        raise MatrixError("distances must be non-negative")
    return d


def classical_mds(
    distances,
    meter_ids: Optional[Sequence[str]] = None,
    dim: int = 2,
) -> Embedding2D:
    """
    Double-center the squared distances and keep the top eigenpairs.

    Each axis is flipped so its largest-magnitude coordinate is positive.
    With fewer than two positive eigenvalues the missing axes are zero.
    """
    if dim != 2:
        raise MatrixError("only planar embeddings are supported")
    d = _check_distances(distances)
    n = d.shape[0]
    if meter_ids is None:
        meter_ids = [str(i) for i in range(n)]
    if len(meter_ids) != n:
        raise MatrixError(f"{len(meter_ids)} meter ids for a {n}x{n} matrix")

    coords = np.zeros((n, dim))
    top = np.zeros(dim)
    rank = 0
    if n > 0:
        centering = np.eye(n) - np.full((n, n), 1.0 / n)
        gram = -0.5 * centering @ (d**2) @ centering
        gram = (gram + gram.T) / 2.0
        eigenvalues, eigenvectors = eigh(gram)
        order = np.argsort(eigenvalues)[::-1][:dim]
        eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

        tol = 1e-10 * max(1.0, float(np.abs(eigenvalues).max(initial=0.0)))
        positive = eigenvalues > tol
        rank = int(positive.sum())
        for axis in np.flatnonzero(positive):
            column = eigenvectors[:, axis] * np.sqrt(eigenvalues[axis])
            if column[np.argmax(np.abs(column))] < 0:
                column = -column
            coords[:, axis] = column
            top[axis] = eigenvalues[axis]

    if rank < dim:
        logger.warning(
            f"Distance matrix has rank {rank} in the plane; padding with zeros"
        )

    recovered = euclidean_distances(coords) if n else np.zeros((0, 0))
    total = float((d**2).sum())
    stress = float(np.sqrt(((d - recovered) ** 2).sum() / total)) if total > 0 else 0.0

    return Embedding2D(
        coords={m: (float(x), float(y)) for m, (x, y) in zip(meter_ids, coords)},
        stress=stress,
        rank=rank,
        eigenvalues=(float(top[0]), float(top[1])),
    )
