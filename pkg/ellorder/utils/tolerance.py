"""
Numerical tolerances shared by the decision procedures.

Every comparison is scaled by the magnitude of the compared quantities, i.e. two values
a and b are equal when |a - b| <= tol * (1 + max magnitude).
"""
import numpy as np

SYMMETRY_TOL = 1e-10
PSD_TOL = 1e-9
EQUALITY_TOL = 1e-9
KERNEL_TOL = 1e-10
FACTORIZATION_TOL = 1e-8


def scale(*arrays) -> float:
    """Returns 1 + the largest absolute entry among the provided arrays."""
    magnitude = 0.0
    for array in arrays:
        array = np.asarray(array, dtype=float)
        if array.size:
            magnitude = max(magnitude, float(np.max(np.abs(array))))
    return 1.0 + magnitude

def is_symmetric(matrix: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.all(np.abs(matrix - matrix.T) <= tol * scale(matrix)))
