from __future__ import annotations
import itertools
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import least_squares, linprog

from .utils.linalg import symmetric_eigh, spectral_radius, psd_sqrt, null_space_basis
from .utils.tolerance import SYMMETRY_TOL, PSD_TOL, EQUALITY_TOL, KERNEL_TOL, FACTORIZATION_TOL, is_symmetric, scale

MAX_COPOSITIVE_DIM = 16


class AsymmetricInput(ValueError):
    pass

class DimensionTooLarge(ValueError):
    pass


class ConeAnswer(Enum):
    YES = 'Yes'
    NO = 'No'
    UNDETERMINED = 'Undetermined'


@dataclass
class ConeVerdict:
    verdict: ConeAnswer
    witness: Optional[np.ndarray] = None
    note: str = ''
    value: Optional[float] = None

    @property
    def yes(self) -> bool:
        return self.verdict is ConeAnswer.YES

    @property
    def no(self) -> bool:
        return self.verdict is ConeAnswer.NO


def _as_symmetric(A) -> np.ndarray:
    A = np.array(A, dtype=float, ndmin=2)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise AsymmetricInput(f"expected a square matrix, got shape {A.shape}.")
    if not is_symmetric(A, SYMMETRY_TOL):
        raise AsymmetricInput(f"matrix is not symmetric: {A.tolist()}.")
    return 0.5 * (A + A.T)

def _unit_max(vector: np.ndarray) -> np.ndarray:
    return vector / np.max(np.abs(vector))

def _quadratic(A: np.ndarray, x: np.ndarray) -> float:
    return float(x @ A @ x)

def _positive_combination(basis: np.ndarray) -> Optional[np.ndarray]:
    """
    Searches span(basis) for a strictly positive vector with a linear program:
    minimize sum(z) subject to z = basis @ c >= 1.
    Returns the vector scaled to min entry 1, or None when infeasible.
    """
    n, d = basis.shape
    if d == 0:
        return None
    if d == 1:
        column = basis[:, 0]
        if np.all(column > KERNEL_TOL):
            return column / column.min()
        if np.all(column < -KERNEL_TOL):
            return column / column.max()
        return None
    result = linprog(
        c=basis.sum(axis=0), A_ub=-basis, b_ub=-np.ones(n),
        bounds=[(None, None)] * d, method='highs')
    if result.status != 0:
        return None
    z = basis @ result.x
    if np.any(z <= 0.0):
        return None
    return z / z.min()

def is_psd(A, tol: float = PSD_TOL) -> ConeVerdict:
    A = _as_symmetric(A)
    values, vectors = symmetric_eigh(A)
    threshold = -tol * (1.0 + spectral_radius(A))
    if values[0] >= threshold:
        return ConeVerdict(ConeAnswer.YES, note=f"smallest eigenvalue {values[0]:.6g} >= {threshold:.3g}")
    witness = _unit_max(vectors[:, 0])
    return ConeVerdict(
        ConeAnswer.NO, witness=witness, value=_quadratic(A, witness),
        note=f"eigenvalue {values[0]:.6g} < 0")

def _kaplan_witness(A: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """First principal submatrix (by size, then lexicographically) with a positive eigenvector of negative eigenvalue."""
    n = A.shape[0]
    threshold = -tol * (1.0 + spectral_radius(A))
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            index = list(subset)
            values, vectors = symmetric_eigh(A[np.ix_(index, index)])
            for value in np.unique(values[values < threshold]):
                eigenspace = vectors[:, np.abs(values - value) <= tol * (1.0 + abs(value))]
                positive = _positive_combination(eigenspace)
                if positive is None:
                    continue
                witness = np.zeros(n)
                witness[index] = positive
                witness = _unit_max(witness)
                if _quadratic(A, witness) < 0.0:
                    return witness
    return None

def is_copositive(A, tol: float = PSD_TOL) -> ConeVerdict:
    A = _as_symmetric(A)
    n = A.shape[0]
    if n > MAX_COPOSITIVE_DIM:
        raise DimensionTooLarge(f"copositivity is enumerated for n <= {MAX_COPOSITIVE_DIM}, got n = {n}.")
    if np.all(A >= 0.0):
        return ConeVerdict(ConeAnswer.YES, note="entrywise nonnegative")
    if is_psd(A, tol).yes:
        return ConeVerdict(ConeAnswer.YES, note="positive semidefinite")
    witness = _kaplan_witness(A, tol)
    if witness is None:
        return ConeVerdict(ConeAnswer.YES, note="no principal submatrix has a positive eigenvector with negative eigenvalue")
    return ConeVerdict(
        ConeAnswer.NO, witness=witness, value=_quadratic(A, witness),
        note="principal submatrix has a positive eigenvector with negative eigenvalue")

def _diagonally_dominant_factor(A: np.ndarray) -> Optional[np.ndarray]:
    # A = sum_{i<j} a_ij (e_i + e_j)(e_i + e_j)' + sum_i r_i e_i e_i'
    n = A.shape[0]
    off_diagonal = A - np.diag(np.diag(A))
    slack = np.diag(A) - off_diagonal.sum(axis=1)
    if np.any(slack < 0.0):
        return None
    rows = []
    for i, j in itertools.combinations(range(n), 2):
        if A[i, j] > 0.0:
            row = np.zeros(n)
            row[[i, j]] = np.sqrt(A[i, j])
            rows.append(row)
    for i in range(n):
        if slack[i] > 0.0:
            row = np.zeros(n)
            row[i] = np.sqrt(slack[i])
            rows.append(row)
    return np.array(rows) if rows else np.zeros((1, n))

def _pivoted_cholesky_factor(A: np.ndarray, tol: float) -> np.ndarray:
    n = A.shape[0]
    residual = A.copy()
    rows = []
    for _ in range(n):
        diagonal = np.diag(residual)
        pivot = int(np.argmax(diagonal))
        if diagonal[pivot] <= tol:
            break
        column = residual[:, pivot] / np.sqrt(diagonal[pivot])
        rows.append(column)
        residual = residual - np.outer(column, column)
    return np.array(rows) if rows else np.zeros((1, n))

def _least_squares_factor(A: np.ndarray, tol: float, attempts: int, seed: int) -> Optional[np.ndarray]:
    n = A.shape[0]
    k = max(n, n * (n + 1) // 2)
    upper = np.triu_indices(n)

    def residuals(x):
        B = x.reshape(k, n)
        return (B.T @ B - A)[upper]

    def jacobian(x):
        B = x.reshape(k, n)
        J = np.zeros((upper[0].size, k, n))
        for m, (a, b) in enumerate(zip(*upper)):
            J[m, :, a] += B[:, b]
            J[m, :, b] += B[:, a]
        return J.reshape(upper[0].size, k * n)

    rng = np.random.default_rng(seed)
    root = np.zeros((k, n))
    root[:n] = np.clip(psd_sqrt(A), 0.0, None)
    starts = [root] + [rng.uniform(0.0, 1.0, size=(k, n)) * np.sqrt(np.max(np.diag(A)) / k) for _ in range(attempts - 1)]
    for start in starts:
        result = least_squares(
            residuals, start.ravel(), jac=jacobian, bounds=(0.0, np.inf),
            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200 * k * n)
        B = result.x.reshape(k, n)
        if _factorization_error(A, B) <= tol * scale(A):
            return B
    return None

def _factorization_error(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.max(np.abs(B.T @ B - A)))

def _accept(A: np.ndarray, B: Optional[np.ndarray], tol: float) -> Optional[np.ndarray]:
    if B is None:
        return None
    if np.any(B < -tol):
        return None
    B = np.clip(B, 0.0, None)
    if _factorization_error(A, B) > tol * scale(A):
        return None
    kept = np.any(B > 0.0, axis=1)
    return B[kept] if np.any(kept) else B[:1]

def is_completely_positive(A, tol: float = FACTORIZATION_TOL, attempts: int = 8, seed: int = 0,
                           entry_tol: float = EQUALITY_TOL) -> ConeVerdict:
    """
    Decides A = B'B with B >= 0 entrywise. Negative entries no larger than entry_tol * scale(A)
    in magnitude count as zero.
    """
    A = _as_symmetric(A)
    n = A.shape[0]
    A = np.where((A < 0.0) & (A >= -entry_tol * scale(A)), 0.0, A)
    if np.any(A < 0.0):
        i, j = np.unravel_index(int(np.argmin(A)), A.shape)
        return ConeVerdict(ConeAnswer.NO, note=f"entry ({i}, {j}) = {A[i, j]:.6g} is negative")
    psd = is_psd(A)
    if psd.no:
        return ConeVerdict(ConeAnswer.NO, witness=psd.witness, value=psd.value, note=f"not positive semidefinite, {psd.note}")
    for name, factor in (
            ('diagonally dominant', lambda: _diagonally_dominant_factor(A)),
            ('pivoted Cholesky', lambda: _pivoted_cholesky_factor(A, tol * scale(A))),
            ('nonnegative least squares', lambda: _least_squares_factor(A, tol, attempts, seed))):
        B = _accept(A, factor(), tol)
        if B is not None:
            return ConeVerdict(ConeAnswer.YES, witness=B, value=_factorization_error(A, B), note=f"{name} factorization")
    if n <= 4:
        warnings.warn(f"no nonnegative factorization found for a doubly nonnegative {n}x{n} matrix.", RuntimeWarning)
        return ConeVerdict(ConeAnswer.YES, note="doubly nonnegative with n <= 4")
    return ConeVerdict(ConeAnswer.UNDETERMINED, note=f"doubly nonnegative, factorization search failed at n = {n}")

def find_positive_kernel(A, tol: float = KERNEL_TOL) -> Optional[np.ndarray]:
    """Returns z > 0 with Az = 0, scaled to min entry 1, or None."""
    A = np.array(A, dtype=float, ndmin=2)
    A = 0.5 * (A + A.T)
    z = _positive_combination(null_space_basis(A, tol))
    if z is None:
        return None
    if np.max(np.abs(A @ z)) > np.sqrt(tol) * scale(A) * np.max(z):
        return None
    return z
