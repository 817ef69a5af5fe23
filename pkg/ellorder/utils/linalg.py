from typing import Tuple

import numpy as np

from .tolerance import KERNEL_TOL


def orient(vectors: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flips each column so that its first nonzero component is positive."""
    vectors = np.array(vectors, dtype=float, copy=True)
    for column in range(vectors.shape[1]):
        nonzero = np.flatnonzero(np.abs(vectors[:, column]) > tol)
        if nonzero.size and vectors[nonzero[0], column] < 0:
            vectors[:, column] = -vectors[:, column]
    return vectors

def symmetric_eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen decomposition of a symmetric matrix with deterministic ordering.
    Eigenvalues are ascending and every eigenvector has its first nonzero component positive.
    """
    matrix = np.asarray(matrix, dtype=float)
    symmetrized = 0.5 * (matrix + matrix.T)
    values, vectors = np.linalg.eigh(symmetrized)
    return values, orient(vectors)

def spectral_radius(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0.0
    values, _ = symmetric_eigh(matrix)
    return float(np.max(np.abs(values)))

def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Symmetric square root A of a PSD matrix (A'A = A A = matrix); tiny negative eigenvalues are clipped."""
    values, vectors = symmetric_eigh(matrix)
    root = vectors * np.sqrt(np.clip(values, 0.0, None))
    return root @ vectors.T

def null_space_basis(matrix: np.ndarray, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space, by singular-value thresholding."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    _, singular_values, vh = np.linalg.svd(matrix)
    threshold = tol * (1.0 + (singular_values[0] if singular_values.size else 0.0))
    rank = int(np.sum(singular_values > threshold))
    return orient(vh[rank:].T.copy())
