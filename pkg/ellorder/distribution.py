from __future__ import annotations
import math
from abc import abstractmethod
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from .utils.linalg import symmetric_eigh, spectral_radius
from .utils.tolerance import SYMMETRY_TOL, PSD_TOL, is_symmetric


class AsymmetricDispersion(ValueError):
    pass

class NotPositiveSemidefinite(ValueError):
    def __init__(self, message: str, eigenvalue: float = None, eigenvector: np.ndarray = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eigenvector = eigenvector

class DimensionMismatch(ValueError):
    pass

class BadGeneratorParameter(ValueError):
    pass

class NonFiniteParameter(ValueError):
    pass

class RankDeficient(ValueError):
    pass

class IndexOutOfRange(ValueError):
    pass

class InfiniteSecondMoment(ValueError):
    pass

class GeneratorMismatch(ValueError):
    pass


class GeneratorSpec(object):
    '''
    Base class for the radial law R of X = mu + R A'U.
    Subclasses are frozen dataclasses, so two specs compare equal iff variant and parameters match.
    '''
    NAME: str = None
    unbounded_support: bool = True

    @abstractmethod
    def second_moment(self, n: int) -> float:
        """Returns E(R^2) for the radial law used in dimension n."""
        raise NotImplementedError

    @abstractmethod
    def phi_prime_zero(self, n: int) -> float:
        """Returns the derivative of the characteristic generator at zero."""
        raise NotImplementedError

    @abstractmethod
    def to_dict(self) -> dict:
        raise NotImplementedError

    def covariance_factor(self, n: int) -> float:
        """Returns -2 phi'(0), the factor turning the dispersion into the covariance."""
        return -2.0 * self.phi_prime_zero(n)

    def check_consistency(self, n: int, tol: float = 1e-10) -> None:
        """Both covariance formulas, -2 phi'(0) Sigma and E(R^2)/n Sigma, must agree."""
        from_generator = self.covariance_factor(n)
        from_radius = self.second_moment(n) / n
        if not math.isfinite(from_radius):
            raise InfiniteSecondMoment(f"E(R^2) is not finite for {self}.")
        if abs(from_generator - from_radius) > tol:
            raise BadGeneratorParameter(
                f"inconsistent generator {self} in dimension {n}: -2phi'(0) = {from_generator}, E(R^2)/n = {from_radius}.")


@dataclass(frozen=True)
class NormalGenerator(GeneratorSpec):
    NAME = 'normal'
    unbounded_support = True

    def second_moment(self, n: int) -> float:
        # R^2 is chi-square with n degrees of freedom
        return float(n)

    def phi_prime_zero(self, n: int) -> float:
        # phi(u) = exp(-u/2)
        return -0.5

    def to_dict(self) -> dict:
        return {'type': self.NAME}


@dataclass(frozen=True)
class StudentTGenerator(GeneratorSpec):
    nu: float
    NAME = 'student_t'
    unbounded_support = True

    def __post_init__(self):
        if not isinstance(self.nu, (int, float)) or isinstance(self.nu, bool):
            raise TypeError(f"the 'nu' specified was of wrong type {type(self.nu)}, expected {float}.")
        if not math.isfinite(self.nu) or self.nu <= 2.0:
            raise BadGeneratorParameter(f"student-t generator requires a finite nu > 2, got {self.nu}.")

    def second_moment(self, n: int) -> float:
        # R^2 = n F with F ~ F(n, nu)
        return n * self.nu / (self.nu - 2.0)

    def phi_prime_zero(self, n: int) -> float:
        return -self.nu / (2.0 * (self.nu - 2.0))

    def to_dict(self) -> dict:
        return {'type': self.NAME, 'nu': float(self.nu)}


@dataclass(frozen=True)
class RadialDiscreteGenerator(GeneratorSpec):
    atoms: Tuple[Tuple[float, float], ...]
    NAME = 'radial_discrete'
    unbounded_support = False

    def __post_init__(self):
        if not isinstance(self.atoms, (list, tuple)) or len(self.atoms) == 0:
            raise BadGeneratorParameter("a radial discrete generator needs at least one atom.")
        atoms = []
        for atom in self.atoms:
            if not isinstance(atom, (list, tuple)) or len(atom) != 2:
                raise BadGeneratorParameter(f"every atom must be a (radius, weight) pair, got {atom}.")
            radius, weight = float(atom[0]), float(atom[1])
            if not math.isfinite(radius) or radius < 0.0:
                raise BadGeneratorParameter(f"atom radius must be finite and >= 0, got {radius}.")
            if not math.isfinite(weight) or weight <= 0.0:
                raise BadGeneratorParameter(f"atom weight must be finite and > 0, got {weight}.")
            atoms.append((radius, weight))
        if abs(math.fsum(weight for _, weight in atoms) - 1.0) > 1e-9:
            raise BadGeneratorParameter("atom weights must sum to 1.")
        object.__setattr__(self, 'atoms', tuple(atoms))

    @property
    def radii(self) -> np.ndarray:
        return np.array([radius for radius, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.atoms])

    def second_moment(self, n: int) -> float:
        return math.fsum(weight * radius ** 2 for radius, weight in self.atoms)

    def phi_prime_zero(self, n: int) -> float:
        # first series coefficient of sum_i w_i 0F1(n/2; -r_i^2 u / 4)
        gamma = n / 2.0
        return math.fsum(weight * (-radius ** 2 / 4.0) / gamma for radius, weight in self.atoms)

    def to_dict(self) -> dict:
        return {'type': self.NAME, 'atoms': [[radius, weight] for radius, weight in self.atoms]}


class EllipticalDistribution(object):
    '''
    X ~ E_n(mu, Sigma, phi), stored by its location, dispersion and radial generator.
    Instances are validated on construction and are read-only afterwards.
    '''
    def __init__(self, mu: Sequence[float], sigma: Sequence[Sequence[float]], gen: GeneratorSpec):
        if not isinstance(gen, GeneratorSpec):
            raise TypeError(f"the 'gen' specified was of wrong type {type(gen)}, expected {GeneratorSpec}.")
        mu = np.array(mu, dtype=float, ndmin=1)
        sigma = np.array(sigma, dtype=float, ndmin=2)
        mu.setflags(write=False)
        sigma.setflags(write=False)
        self.mu: np.ndarray = mu
        self.sigma: np.ndarray = sigma
        self.gen: GeneratorSpec = gen
        validate(self)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def __repr__(self) -> str:
        return f"E_{self.n}(mu={self.mu.tolist()}, sigma={self.sigma.tolist()}, {self.gen})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, EllipticalDistribution):
            return False
        return self.gen == other.gen and np.array_equal(self.mu, other.mu) and np.array_equal(self.sigma, other.sigma)

    def __hash__(self):
        return hash((self.gen, self.mu.tobytes(), self.sigma.tobytes()))

    def to_dict(self) -> dict:
        return {
            'dim': self.n,
            'location': self.mu.tolist(),
            'dispersion': self.sigma.tolist(),
            'generator': self.gen.to_dict()}


def check_dispersion(sigma: np.ndarray, symmetry_tol: float = SYMMETRY_TOL, psd_tol: float = PSD_TOL) -> None:
    """Raises unless sigma is square, finite, symmetric and positive semidefinite within tolerance."""
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"the dispersion matrix must be square, got shape {sigma.shape}.")
    if not np.all(np.isfinite(sigma)):
        raise NonFiniteParameter("the dispersion matrix has non-finite entries.")
    if not is_symmetric(sigma, symmetry_tol):
        raise AsymmetricDispersion(f"the dispersion matrix is not symmetric: {sigma.tolist()}.")
    values, vectors = symmetric_eigh(sigma)
    if values.size and values[0] < -psd_tol * (1.0 + spectral_radius(sigma)):
        raise NotPositiveSemidefinite(
            f"the dispersion matrix has negative eigenvalue {values[0]} at {vectors[:, 0].tolist()}.",
            eigenvalue=float(values[0]), eigenvector=vectors[:, 0])

def validate(dist: EllipticalDistribution) -> None:
    """Returns only if every invariant of the distribution holds."""
    if not isinstance(dist, EllipticalDistribution):
        raise TypeError(f"the 'dist' specified was of wrong type {type(dist)}, expected {EllipticalDistribution}.")
    if dist.mu.ndim != 1:
        raise DimensionMismatch(f"the location must be a vector, got shape {dist.mu.shape}.")
    if not np.all(np.isfinite(dist.mu)):
        raise NonFiniteParameter("the location has non-finite entries.")
    if dist.sigma.shape != (dist.n, dist.n):
        raise DimensionMismatch(f"the dispersion must be {dist.n}x{dist.n}, got shape {dist.sigma.shape}.")
    check_dispersion(dist.sigma)
    dist.gen.check_consistency(dist.n)

def check_comparable(dX: EllipticalDistribution, dY: EllipticalDistribution) -> None:
    """Every comparison result assumes a common dimension and a common characteristic generator."""
    if not isinstance(dX, EllipticalDistribution):
        raise TypeError(f"the 'dX' specified was of wrong type {type(dX)}, expected {EllipticalDistribution}.")
    if not isinstance(dY, EllipticalDistribution):
        raise TypeError(f"the 'dY' specified was of wrong type {type(dY)}, expected {EllipticalDistribution}.")
    if dX.n != dY.n:
        raise DimensionMismatch(f"the distributions have different dimensions, {dX.n} != {dY.n}.")
    if dX.gen != dY.gen:
        raise GeneratorMismatch(f"the distributions have different generators, {dX.gen} != {dY.gen}.")

def affine_transform(dist: EllipticalDistribution, B: Sequence[Sequence[float]], b: Sequence[float] = None) -> EllipticalDistribution:
    """Returns the law of B X + b, i.e. E_m(B mu + b, B Sigma B', phi)."""
    B = np.array(B, dtype=float, ndmin=2)
    if B.ndim != 2 or B.shape[1] != dist.n:
        raise DimensionMismatch(f"B must have {dist.n} columns, got shape {B.shape}.")
    m = B.shape[0]
    b = np.zeros(m) if b is None else np.array(b, dtype=float, ndmin=1)
    if b.shape != (m,):
        raise DimensionMismatch(f"b must have length {m}, got shape {b.shape}.")
    if m > dist.n or np.linalg.matrix_rank(B) < m:
        raise RankDeficient(f"B must have full row rank {m}.")
    sigma = B @ dist.sigma @ B.T
    return EllipticalDistribution(B @ dist.mu + b, 0.5 * (sigma + sigma.T), dist.gen)

def marginal_of(dist: EllipticalDistribution, idx: Sequence[int]) -> EllipticalDistribution:
    """Returns the marginal law of the coordinates in idx (0-based, strictly increasing)."""
    idx = list(idx)
    if not idx:
        raise IndexOutOfRange("the index subset must be nonempty.")
    if any(not isinstance(i, (int, np.integer)) for i in idx):
        raise TypeError("the index subset must contain integers.")
    if any(i < 0 or i >= dist.n for i in idx):
        raise IndexOutOfRange(f"indices must lie within 0..{dist.n - 1}, got {idx}.")
    if any(a >= b for a, b in zip(idx, idx[1:])):
        raise IndexOutOfRange(f"indices must be strictly increasing, got {idx}.")
    return EllipticalDistribution(dist.mu[idx], dist.sigma[np.ix_(idx, idx)], dist.gen)

def covariance_of(dist: EllipticalDistribution) -> np.ndarray:
    """Cov(X) = E(R^2)/n Sigma."""
    second_moment = dist.gen.second_moment(dist.n)
    if not math.isfinite(second_moment):
        raise InfiniteSecondMoment(f"E(R^2) is not finite for {dist.gen}.")
    return (second_moment / dist.n) * np.array(dist.sigma)

def interpolate(dX: EllipticalDistribution, dY: EllipticalDistribution, lam: float) -> EllipticalDistribution:
    """Returns E_n(lam mu_y + (1 - lam) mu_x, lam Sigma_y + (1 - lam) Sigma_x, phi)."""
    check_comparable(dX, dY)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}.")
    return EllipticalDistribution(
        lam * dY.mu + (1.0 - lam) * dX.mu, lam * dY.sigma + (1.0 - lam) * dX.sigma, dX.gen)

def _check_family_arguments(n: int, variance: float, rho: float) -> None:
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"the 'n' specified was of wrong type {type(n)}, expected {int}.")
    if n < 1:
        raise ValueError(f"the dimension must be at least 1, got {n}.")
    if not variance > 0.0:
        raise ValueError(f"the variance must be positive, got {variance}.")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}.")

def build_equicorrelated(n: int, variance: float, rho: float) -> np.ndarray:
    """Dispersion with diagonal variance and every off-diagonal entry rho * variance."""
    _check_family_arguments(n, variance, rho)
    if n > 1 and rho < -1.0 / (n - 1):
        raise NotPositiveSemidefinite(
            f"equicorrelated dispersion with rho={rho} < -1/(n-1) is not positive semidefinite.",
            eigenvalue=variance * (1.0 + (n - 1) * rho), eigenvector=np.ones(n) / math.sqrt(n))
    sigma = np.full((n, n), rho * variance)
    np.fill_diagonal(sigma, variance)
    return sigma

def build_ar1(n: int, variance: float, rho: float) -> np.ndarray:
    """Serial correlation dispersion, entry (i, j) = rho^|i-j| * variance."""
    _check_family_arguments(n, variance, rho)
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return variance * np.power(float(rho), lags)

def is_equicorrelated(sigma: np.ndarray, tol: float = 1e-12) -> bool:
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0]
    if n < 2:
        return True
    off_diagonal = sigma[~np.eye(n, dtype=bool)]
    diagonal = np.diag(sigma)
    return bool(np.ptp(off_diagonal) <= tol and np.ptp(diagonal) <= tol)

GENERATORS = {
    NormalGenerator.NAME: NormalGenerator,
    StudentTGenerator.NAME: StudentTGenerator,
    RadialDiscreteGenerator.NAME: RadialDiscreteGenerator}

def import_generator(name: str, **parameters) -> GeneratorSpec:
    if name not in GENERATORS:
        raise NotImplementedError(f"Your requested generator '{name}' is not available.")
    return GENERATORS[name](**parameters)
