from __future__ import annotations
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
from scipy.special import gammaln, jv, ive, kve
from scipy.stats import f as f_distribution

from .distribution import (
    GeneratorSpec, NormalGenerator, StudentTGenerator, RadialDiscreteGenerator, InfiniteSecondMoment)
from .utils.quadrature import gauss_legendre

NEGATIVE_SWITCHOVER = 16.0
POSITIVE_SWITCHOVER = 50.0
SERIES_TOL = 1e-13
MAX_TERMS = 10000
RADIAL_NODES = 200

ArrayLike = Union[float, np.ndarray]


class NonPositiveParameter(ValueError):
    pass

class NegativeArgument(ValueError):
    pass


@dataclass
class SeriesEval:
    value: float
    terms_used: int
    truncation_bound: float


def _check_gamma(gamma: float) -> None:
    if not isinstance(gamma, (int, float, np.floating, np.integer)):
        raise TypeError(f"the 'gamma' specified was of wrong type {type(gamma)}, expected {float}.")
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise NonPositiveParameter(f"0F1 requires gamma > 0, got {gamma}.")

def _series(gamma: float, z: np.ndarray) -> Tuple[np.ndarray, int, np.ndarray]:
    """
    Neumaier-compensated summation of sum_k z^k / ((gamma)_k k!) over a vector of arguments.
    Stops once the geometric tail bound |t_{k+1}| / (1 - q) falls below SERIES_TOL (1 + |sum|).
    """
    total = np.ones_like(z)
    compensation = np.zeros_like(z)
    term = np.ones_like(z)
    bound = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    k = 0
    while np.any(active) and k < MAX_TERMS:
        term = np.where(active, term * z / ((gamma + k) * (k + 1)), 0.0)
        k += 1
        updated = total + term
        compensation += np.where(
            np.abs(total) >= np.abs(term), (total - updated) + term, (term - updated) + total)
        total = updated
        ratio = np.abs(z) / ((gamma + k) * (k + 1))
        next_term = np.abs(term) * ratio
        tail = np.where(ratio < 1.0, next_term / np.maximum(1.0 - ratio, 1e-300), np.inf)
        bound = np.where(active, tail, bound)
        active &= ~(tail <= SERIES_TOL * (1.0 + np.abs(total + compensation)))
    return total + compensation, k + 1, bound

def _bessel_negative(gamma: float, z: np.ndarray) -> np.ndarray:
    # 0F1(gamma; -x^2/4) = Gamma(gamma) (x/2)^(1-gamma) J_{gamma-1}(x)
    x = 2.0 * np.sqrt(-z)
    return np.exp(gammaln(gamma) + (1.0 - gamma) * np.log(x / 2.0)) * jv(gamma - 1.0, x)

def _bessel_positive(gamma: float, z: np.ndarray) -> np.ndarray:
    # 0F1(gamma; x^2/4) = Gamma(gamma) (x/2)^(1-gamma) I_{gamma-1}(x), with I scaled by exp(-x)
    x = 2.0 * np.sqrt(z)
    return np.exp(gammaln(gamma) + (1.0 - gamma) * np.log(x / 2.0) + x) * ive(gamma - 1.0, x)

def hyp0f1_array(gamma: float, z: ArrayLike) -> np.ndarray:
    """Vectorized 0F1(gamma; z) for real z."""
    _check_gamma(gamma)
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("0F1 arguments must be finite.")
    flat = z.ravel()
    values = np.empty_like(flat)
    negative = flat < -NEGATIVE_SWITCHOVER
    positive = flat > POSITIVE_SWITCHOVER
    series = ~(negative | positive)
    if np.any(series):
        values[series], _, _ = _series(gamma, flat[series])
    if np.any(negative):
        values[negative] = _bessel_negative(gamma, flat[negative])
    if np.any(positive):
        values[positive] = _bessel_positive(gamma, flat[positive])
    return values.reshape(z.shape)

def hyp0f1(gamma: float, z: float) -> SeriesEval:
    """
    Generalized hypergeometric series 0F1(gamma; z) = sum_k z^k / ((gamma)_k k!).
    Moderate arguments are summed directly; large |z| goes through the Bessel connection,
    where the reported truncation bound is the rounding level of the Bessel evaluation.
    """
    _check_gamma(gamma)
    z = float(z)
    if not math.isfinite(z):
        raise ValueError(f"0F1 argument must be finite, got {z}.")
    if -NEGATIVE_SWITCHOVER <= z <= POSITIVE_SWITCHOVER:
        values, terms, bounds = _series(gamma, np.array([z]))
        return SeriesEval(float(values[0]), terms, float(bounds[0]))
    value = float(hyp0f1_array(gamma, z))
    return SeriesEval(value, 0, 16.0 * np.finfo(float).eps * (1.0 + abs(value)))

@lru_cache(maxsize=64)
def _student_t_radial_rule(nu: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes r and weights w with sum_i w_i g(r_i) ~ E g(R), R = sqrt(n F(n, nu))."""
    s, weights = gauss_legendre(RADIAL_NODES)
    r = s / (1.0 - s)
    jacobian = 1.0 / (1.0 - s) ** 2
    density = f_distribution.pdf(r ** 2 / n, n, nu) * 2.0 * r / n
    mass = weights * density * jacobian
    mass.setflags(write=False)
    r.setflags(write=False)
    return r, mass

def _check_argument(u: ArrayLike) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(u < 0.0):
        raise NegativeArgument(f"the characteristic generator is evaluated at u >= 0, got {u}.")
    return u

def _scalar_or_array(value: np.ndarray):
    return float(value) if value.ndim == 0 else value

def psi_value(gen: GeneratorSpec, n: int, u: ArrayLike):
    """phi(u) of the elliptical law in dimension n, from its radial law."""
    u = _check_argument(u)
    if isinstance(gen, NormalGenerator):
        value = np.exp(-u / 2.0)
    elif isinstance(gen, RadialDiscreteGenerator):
        value = sum(weight * hyp0f1_array(n / 2.0, -radius ** 2 * u / 4.0) for radius, weight in gen.atoms)
    elif isinstance(gen, StudentTGenerator):
        value = student_t_psi_closed_form(float(gen.nu), u)
    else:
        raise TypeError(f"the 'gen' specified was of wrong type {type(gen)}, expected {GeneratorSpec}.")
    return _scalar_or_array(np.asarray(value, dtype=float))

def psi1_value(gen: GeneratorSpec, n: int, u: ArrayLike):
    """
    The generator of the r^2 size-biased radial law: psi1(u) = E(R^2 0F1(n/2 + 1; -R^2 u / 4)) / E(R^2).
    Satisfies psi'(u) = -E(R^2) / (2n) psi1(u).
    """
    u = _check_argument(u)
    second_moment = radial_second_moment(gen, n)
    if not math.isfinite(second_moment):
        raise InfiniteSecondMoment(f"E(R^2) is not finite for {gen}.")
    if isinstance(gen, NormalGenerator):
        value = np.exp(-u / 2.0)
    elif isinstance(gen, RadialDiscreteGenerator):
        if second_moment == 0.0:
            value = np.ones_like(u)
        else:
            value = sum(
                weight * radius ** 2 * hyp0f1_array(n / 2.0 + 1.0, -radius ** 2 * u / 4.0)
                for radius, weight in gen.atoms) / second_moment
    elif isinstance(gen, StudentTGenerator):
        value = student_t_psi1_closed_form(float(gen.nu), u)
    else:
        raise TypeError(f"the 'gen' specified was of wrong type {type(gen)}, expected {GeneratorSpec}.")
    return _scalar_or_array(np.asarray(value, dtype=float))

def radial_second_moment(gen: GeneratorSpec, n: int) -> float:
    return gen.second_moment(n)

def student_t_psi_closed_form(nu: float, u: ArrayLike):
    """phi(u) = K_{nu/2}(sqrt(nu u)) sqrt(nu u)^(nu/2) / (Gamma(nu/2) 2^(nu/2 - 1))."""
    u = _check_argument(u)
    x = np.sqrt(nu * u)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = np.exp(
            (nu / 2.0) * np.log(x) - gammaln(nu / 2.0) - (nu / 2.0 - 1.0) * math.log(2.0) - x) * kve(nu / 2.0, x)
    value = np.where(x == 0.0, 1.0, value)
    return _scalar_or_array(np.asarray(value, dtype=float))

def student_t_psi1_closed_form(nu: float, u: ArrayLike):
    """
    psi1(u) = (nu - 2) K_b(x) x^b / (Gamma(nu/2) 2^(nu/2 - 1)), b = nu/2 - 1, x = sqrt(nu u).
    Like phi, it does not depend on the dimension.
    """
    if nu <= 2.0:
        raise InfiniteSecondMoment(f"E(R^2) is not finite for Student-t with nu = {nu}.")
    u = _check_argument(u)
    x = np.sqrt(nu * u)
    order = nu / 2.0 - 1.0
    with np.errstate(divide='ignore', invalid='ignore'):
        value = (nu - 2.0) * np.exp(
            order * np.log(x) - gammaln(nu / 2.0) - order * math.log(2.0) - x) * kve(order, x)
    value = np.where(x == 0.0, 1.0, value)
    return _scalar_or_array(np.asarray(value, dtype=float))

def student_t_radial_quadrature(nu: float, n: int, u: ArrayLike, size_biased: bool = False):
    """
    phi(u), or psi1(u) when size_biased, integrated directly over the radial law of the
    n-dimensional Student-t. Loses accuracy once the kernel oscillates faster than the nodes
    resolve the heavy tail, so it serves as a check of the closed forms at moderate u.
    """
    u = _check_argument(u)
    r, mass = _student_t_radial_rule(float(nu), n)
    if size_biased:
        mass = mass * r ** 2
    gamma = n / 2.0 + (1.0 if size_biased else 0.0)
    kernel = hyp0f1_array(gamma, -np.multiply.outer(u, r ** 2) / 4.0)
    return _scalar_or_array(np.asarray(kernel @ mass / mass.sum(), dtype=float))
