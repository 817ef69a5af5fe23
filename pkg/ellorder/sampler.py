from __future__ import annotations
import math
from typing import List, Sequence, Tuple

import numpy as np

from .distribution import (
    EllipticalDistribution, GeneratorSpec, NormalGenerator, StudentTGenerator, RadialDiscreteGenerator,
    InfiniteSecondMoment, check_comparable)
from .utils.iterable import split_number_evenly
from .utils.linalg import psd_sqrt


class RandomStream(object):
    '''
    Seeded source of random numbers backed by a PCG64 generator.
    The same seed always produces the same sequence of draws. split(k) derives k independent
    sub-streams from the seed, the stream's own spawn key and the number of earlier splits,
    so repeating the same sequence of calls repeats the same sub-streams.
    '''
    def __init__(self, seed: int, spawn_key: Tuple[int, ...] = ()):
        if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
            raise TypeError(f"the 'seed' specified was of wrong type {type(seed)}, expected {int}.")
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError(f"the seed must be a 64-bit unsigned integer, got {seed}.")
        self.seed = int(seed)
        self.spawn_key = tuple(spawn_key)
        self.position = 0
        self.splits = 0
        self._generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)))

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, spawn_key={self.spawn_key}, position={self.position})"

    def split(self, k: int) -> List[RandomStream]:
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ValueError(f"a stream splits into at least one sub-stream, got {k}.")
        children = [RandomStream(self.seed, self.spawn_key + (self.splits, index)) for index in range(k)]
        self.splits += 1
        return children

    def _count(self, values: np.ndarray) -> np.ndarray:
        self.position += int(np.size(values))
        return values

    def standard_normal(self, size) -> np.ndarray:
        return self._count(self._generator.standard_normal(size))

    def uniform(self, size) -> np.ndarray:
        return self._count(self._generator.random(size))

    def chisquare(self, df: float, size) -> np.ndarray:
        return self._count(self._generator.chisquare(df, size))

    def f(self, dfnum: float, dfden: float, size) -> np.ndarray:
        return self._count(self._generator.f(dfnum, dfden, size))

    def choice(self, values: np.ndarray, size, p: np.ndarray) -> np.ndarray:
        return self._count(self._generator.choice(values, size=size, p=p))


def _check_sizes(n: int, N: int) -> None:
    if n < 1:
        raise ValueError(f"the dimension must be at least 1, got {n}.")
    if N < 1:
        raise ValueError(f"the number of draws must be at least 1, got {N}.")

def sample_unit_sphere(n: int, N: int, stream: RandomStream) -> np.ndarray:
    """N draws of U uniform on the unit sphere of R^n, as rows."""
    _check_sizes(n, N)
    directions = stream.standard_normal((N, n))
    norms = np.linalg.norm(directions, axis=1)
    while np.any(norms == 0.0):
        zero = norms == 0.0
        directions[zero] = stream.standard_normal((int(zero.sum()), n))
        norms = np.linalg.norm(directions, axis=1)
    return directions / norms[:, None]

def sample_radius(gen: GeneratorSpec, n: int, N: int, stream: RandomStream) -> np.ndarray:
    _check_sizes(n, N)
    if isinstance(gen, NormalGenerator):
        return np.sqrt(stream.chisquare(n, N))
    if isinstance(gen, StudentTGenerator):
        return np.sqrt(n * stream.f(n, gen.nu, N))
    if isinstance(gen, RadialDiscreteGenerator):
        return stream.choice(gen.radii, N, p=gen.weights)
    raise TypeError(f"the 'gen' specified was of wrong type {type(gen)}, expected {GeneratorSpec}.")

def sample_size_biased_radius(gen: GeneratorSpec, n: int, N: int, stream: RandomStream) -> np.ndarray:
    """Draws from the radial law reweighted by r^2 / E(R^2)."""
    _check_sizes(n, N)
    if not math.isfinite(gen.second_moment(n)):
        raise InfiniteSecondMoment(f"E(R^2) is not finite for {gen}.")
    if isinstance(gen, NormalGenerator):
        return np.sqrt(stream.chisquare(n + 2, N))
    if isinstance(gen, StudentTGenerator):
        # R^2 = nu chi2(n) / chi2(nu); the r^2 weight shifts both degrees of freedom
        return np.sqrt(gen.nu * stream.chisquare(n + 2, N) / stream.chisquare(gen.nu - 2.0, N))
    if isinstance(gen, RadialDiscreteGenerator):
        biased = gen.weights * gen.radii ** 2
        if biased.sum() == 0.0:
            return np.zeros(N)
        return stream.choice(gen.radii, N, p=biased / biased.sum())
    raise TypeError(f"the 'gen' specified was of wrong type {type(gen)}, expected {GeneratorSpec}.")

def sample_psi1_radius(gen: GeneratorSpec, n: int, N: int, stream: RandomStream) -> np.ndarray:
    """R1 = R~ V^(1/n): size-biased radius times the radius of a uniform point in the unit ball."""
    biased = sample_size_biased_radius(gen, n, N, stream)
    return biased * stream.uniform(N) ** (1.0 / n)

def matrix_root(sigma: np.ndarray) -> np.ndarray:
    """Symmetric A with A'A = sigma; works for singular sigma."""
    return psd_sqrt(sigma)

def partition_counts(N: int, k: int) -> List[int]:
    """Splits N draws into k near-equal blocks, larger blocks last."""
    return split_number_evenly(N, k)

def _assemble(mu: np.ndarray, root: np.ndarray, radius: np.ndarray, directions: np.ndarray) -> np.ndarray:
    # row form of X = mu + R A'U
    return mu + radius[:, None] * (directions @ root)

def sample_elliptical(dist: EllipticalDistribution, N: int, stream: RandomStream) -> np.ndarray:
    radius = sample_radius(dist.gen, dist.n, N, stream)
    directions = sample_unit_sphere(dist.n, N, stream)
    return _assemble(dist.mu, matrix_root(dist.sigma), radius, directions)

def sample_coupled(dX: EllipticalDistribution, dY: EllipticalDistribution, N: int, stream: RandomStream) -> Tuple[np.ndarray, np.ndarray]:
    """Draws of X and Y sharing (R, U) row by row."""
    check_comparable(dX, dY)
    radius = sample_radius(dX.gen, dX.n, N, stream)
    directions = sample_unit_sphere(dX.n, N, stream)
    return (_assemble(dX.mu, matrix_root(dX.sigma), radius, directions),
            _assemble(dY.mu, matrix_root(dY.sigma), radius, directions))

def sample_coupled_family(dists: Sequence[EllipticalDistribution], N: int, stream: RandomStream) -> List[np.ndarray]:
    """Draws of every distribution in the family from one shared (R, U)."""
    if not dists:
        raise ValueError("the family must contain at least one distribution.")
    for other in dists[1:]:
        check_comparable(dists[0], other)
    radius = sample_radius(dists[0].gen, dists[0].n, N, stream)
    directions = sample_unit_sphere(dists[0].n, N, stream)
    return [_assemble(dist.mu, matrix_root(dist.sigma), radius, directions) for dist in dists]

def sample_psi1_elliptical(dist: EllipticalDistribution, N: int, stream: RandomStream) -> np.ndarray:
    """Draws from the elliptical law with generator psi1 and the same location and dispersion."""
    radius = sample_psi1_radius(dist.gen, dist.n, N, stream)
    directions = sample_unit_sphere(dist.n, N, stream)
    return _assemble(dist.mu, matrix_root(dist.sigma), radius, directions)
