from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_legendre


@lru_cache(maxsize=32)
def _legendre(k: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(k)
    return nodes, weights

def gauss_legendre(k: int, lower: float = 0.0, upper: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """Returns k Gauss-Legendre nodes and weights on [lower, upper]."""
    if not isinstance(k, int):
        raise TypeError(f"the 'k' specified was of wrong type {type(k)}, expected {int}.")
    if k < 1:
        raise ValueError("the number of quadrature nodes must be at least 1.")
    nodes, weights = _legendre(k)
    half_width = 0.5 * (upper - lower)
    return lower + half_width * (nodes + 1.0), weights * half_width
