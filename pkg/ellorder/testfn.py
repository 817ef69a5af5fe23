from __future__ import annotations
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Union

import numpy as np
from scipy.special import expit, logsumexp, ndtr, softmax

from .cones import is_copositive, is_completely_positive
from .engine import OrderRelation
from .sampler import RandomStream

Array = np.ndarray

INCREASING = 'increasing'
CONVEX = 'convex'
LINEAR_CONVEX = 'linear-convex'
COMPONENTWISE_CONVEX = 'componentwise-convex'
SUPERMODULAR = 'supermodular'
DIRECTIONALLY_CONVEX = 'directionally-convex'
DELTA_MONOTONE = 'delta-monotone'
CP_HESSIAN = 'cp-hessian'
COP_HESSIAN = 'cop-hessian'

CLASS_TAGS = (
    INCREASING, CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, SUPERMODULAR,
    DIRECTIONALLY_CONVEX, DELTA_MONOTONE, CP_HESSIAN, COP_HESSIAN)

REQUIRED_TAGS: Dict[OrderRelation, FrozenSet[str]] = {
    OrderRelation.ST: frozenset({INCREASING}),
    OrderRelation.CX: frozenset({CONVEX}),
    OrderRelation.LCX: frozenset({LINEAR_CONVEX}),
    OrderRelation.ICX: frozenset({INCREASING, CONVEX}),
    OrderRelation.SM: frozenset({SUPERMODULAR}),
    OrderRelation.ISM: frozenset({INCREASING, SUPERMODULAR}),
    OrderRelation.DCX: frozenset({DIRECTIONALLY_CONVEX}),
    OrderRelation.IDCX: frozenset({INCREASING, DIRECTIONALLY_CONVEX}),
    OrderRelation.UO: frozenset({DELTA_MONOTONE}),
    OrderRelation.CCX: frozenset({COMPONENTWISE_CONVEX}),
    OrderRelation.ICCX: frozenset({INCREASING, COMPONENTWISE_CONVEX}),
    OrderRelation.CP: frozenset({CP_HESSIAN}),
    OrderRelation.COP: frozenset({COP_HESSIAN})}

UNIVARIATE_RELATIONS = (OrderRelation.ST, OrderRelation.CX, OrderRelation.LCX, OrderRelation.ICX)

SMOOTHING_BANDWIDTH = 0.1


class UnsupportedArity(ValueError):
    pass

class UnknownTestFunction(ValueError):
    pass


@dataclass(frozen=True)
class TestFunction:
    '''
    A test function f: R^n -> R evaluated row-wise on an (N, n) array.
    arity is the number of leading coordinates f depends on, None meaning all of them;
    degree is the polynomial growth order, |f(x)| = O(|x|^degree).
    '''
    id: str
    classes: FrozenSet[str]
    evaluate: Callable[[Array], Array] = field(repr=False, compare=False)
    degree: float
    arity: Optional[int] = None
    min_dim: int = 1
    gradient: Optional[Callable[[Array], Array]] = field(default=None, repr=False, compare=False)
    hessian: Optional[Callable[[Array], Array]] = field(default=None, repr=False, compare=False)
    description: str = ''

    @property
    def growth(self) -> str:
        if self.degree == 0:
            return "bounded"
        return f"f(x) = O(|x|^{self.degree:g})"

    def supports(self, n: int) -> bool:
        return n >= max(self.min_dim, self.arity or 1)

    def __call__(self, X: Array) -> Array:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if not self.supports(X.shape[1]):
            raise UnsupportedArity(f"{self.id} needs at least {max(self.min_dim, self.arity or 1)} coordinates, got {X.shape[1]}.")
        return self.evaluate(X)

    def gradient_at(self, X: Array) -> Array:
        """Closed-form gradient if defined, central differences with step 1e-4 (1 + |x_i|) otherwise."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.gradient is not None:
            return self.gradient(X)
        steps = 1e-4 * (1.0 + np.abs(X))
        gradient = np.empty_like(X)
        for i in range(X.shape[1]):
            shift = np.zeros_like(X)
            shift[:, i] = steps[:, i]
            gradient[:, i] = (self(X + shift) - self(X - shift)) / (2.0 * steps[:, i])
        return gradient

    def hessian_at(self, X: Array) -> Array:
        """Closed-form Hessian if defined, central differences with step 1e-4 (1 + |x_i|) otherwise."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.hessian is not None:
            return self.hessian(X)
        return _finite_difference_hessian(self, X, 1e-4 * (1.0 + np.abs(X)))

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'classes': sorted(self.classes),
            'arity': 'any' if self.arity is None else self.arity,
            'growth': self.growth,
            'description': self.description}


def _finite_difference_hessian(f: TestFunction, X: Array, steps: Array) -> Array:
    N, n = X.shape
    hessian = np.empty((N, n, n))
    center = f(X)
    for i in range(n):
        ei = np.zeros_like(X)
        ei[:, i] = steps[:, i]
        hessian[:, i, i] = (f(X + ei) - 2.0 * center + f(X - ei)) / steps[:, i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros_like(X)
            ej[:, j] = steps[:, j]
            mixed = (f(X + ei + ej) - f(X + ei - ej) - f(X - ei + ej) + f(X - ei - ej)) / (4.0 * steps[:, i] * steps[:, j])
            hessian[:, i, j] = hessian[:, j, i] = mixed
    return hessian


def _softplus(x: Array) -> Array:
    return np.logaddexp(0.0, x)

def _padded(values: Sequence[float], n: int) -> Array:
    vector = np.zeros(n)
    vector[:min(len(values), n)] = values[:n]
    return vector

def _ones(n: int) -> Array:
    return np.ones(n)

def _alternating(n: int) -> Array:
    return np.where(np.arange(n) % 2 == 0, 1.0, -0.5)

def _positive_alternating(n: int) -> Array:
    return np.where(np.arange(n) % 2 == 0, 1.0, 0.5)

def _ridge(id: str, classes, coefficients: Callable[[int], Array], nu, dnu, d2nu, degree: float,
           arity: Optional[int] = None, description: str = '') -> TestFunction:
    """f(x) = nu(a'x)."""
    def evaluate(X):
        return nu(X @ coefficients(X.shape[1]))

    def gradient(X):
        a = coefficients(X.shape[1])
        return dnu(X @ a)[:, None] * a[None, :]

    def hessian(X):
        a = coefficients(X.shape[1])
        return d2nu(X @ a)[:, None, None] * np.outer(a, a)[None, :, :]

    return TestFunction(id, frozenset(classes), evaluate, degree, arity, 1, gradient, hessian, description)

def _additive(id: str, classes, g, dg, d2g, degree: float, weights: Callable[[int], Array] = _ones,
              scales: Callable[[int], Array] = _ones, arity: Optional[int] = None, description: str = '') -> TestFunction:
    """f(x) = sum_i w_i g(c_i x_i)."""
    def evaluate(X):
        n = X.shape[1]
        return (weights(n) * g(scales(n) * X)).sum(axis=1)

    def gradient(X):
        n = X.shape[1]
        c = scales(n)
        return weights(n) * c * dg(c * X)

    def hessian(X):
        n = X.shape[1]
        c = scales(n)
        diagonal = weights(n) * c ** 2 * d2g(c * X)
        return diagonal[:, :, None] * np.eye(n)[None, :, :]

    return TestFunction(id, frozenset(classes), evaluate, degree, arity, 1, gradient, hessian, description)

def _quadratic(id: str, classes, matrix: Callable[[int], Array], arity: Optional[int] = None,
               min_dim: int = 1, description: str = '') -> TestFunction:
    """f(x) = x'Mx."""
    def evaluate(X):
        return np.einsum('ki,ij,kj->k', X, matrix(X.shape[1]), X)

    def gradient(X):
        return 2.0 * X @ matrix(X.shape[1])

    def hessian(X):
        return np.broadcast_to(2.0 * matrix(X.shape[1]), (X.shape[0], X.shape[1], X.shape[1])).copy()

    return TestFunction(id, frozenset(classes), evaluate, 2, arity, min_dim, gradient, hessian, description)

def _pair_matrix(entries: Sequence[Sequence[float]]) -> Callable[[int], Array]:
    block = np.array(entries, dtype=float)

    def matrix(n: int) -> Array:
        M = np.zeros((n, n))
        k = block.shape[0]
        M[:k, :k] = block
        return M
    return matrix

def _tridiagonal(n: int) -> Array:
    return 2.0 * np.eye(n) + np.eye(n, k=1) + np.eye(n, k=-1)

def _negative_sample_variance(n: int) -> Array:
    return -(np.eye(n) - np.full((n, n), 1.0 / n)) / (n - 1)

def _survival_indicator(threshold: float) -> TestFunction:
    return TestFunction(
        f"survival_indicator_{threshold:g}", frozenset({INCREASING, SUPERMODULAR, DELTA_MONOTONE}),
        lambda X: np.all(X > threshold, axis=1).astype(float), 0,
        description=f"1{{x_i > {threshold:g} for all i}}")

def _smoothed_survival(threshold: float, bandwidth: float = SMOOTHING_BANDWIDTH) -> TestFunction:
    return TestFunction(
        f"smoothed_survival_{threshold:g}", frozenset({INCREASING, SUPERMODULAR, DELTA_MONOTONE}),
        lambda X: np.prod(expit((X - threshold) / bandwidth), axis=1), 0,
        description=f"prod_i logistic((x_i - {threshold:g}) / {bandwidth:g})")

def _smoothed_min(X: Array, bandwidth: float = 0.25) -> Array:
    return -bandwidth * logsumexp(-X / bandwidth, axis=1)

def _smoothed_min_gradient(X: Array, bandwidth: float = 0.25) -> Array:
    return softmax(-X / bandwidth, axis=1)

def _smoothed_min_hessian(X: Array, bandwidth: float = 0.25) -> Array:
    p = softmax(-X / bandwidth, axis=1)
    return (p[:, :, None] * p[:, None, :] - p[:, :, None] * np.eye(X.shape[1])[None, :, :]) / bandwidth

def _logsumexp_hessian(X: Array) -> Array:
    p = softmax(X, axis=1)
    return p[:, :, None] * np.eye(X.shape[1])[None, :, :] - p[:, :, None] * p[:, None, :]

def _running_maximum(X: Array) -> Array:
    return np.max(np.cumsum(X, axis=1), axis=1)

def _softplus_product(X: Array) -> Array:
    return _softplus(X[:, 0]) * _softplus(X[:, 1])

def _softplus_product_gradient(X: Array) -> Array:
    gradient = np.zeros_like(X)
    gradient[:, 0] = expit(X[:, 0]) * _softplus(X[:, 1])
    gradient[:, 1] = _softplus(X[:, 0]) * expit(X[:, 1])
    return gradient

def _softplus_product_hessian(X: Array) -> Array:
    hessian = np.zeros((X.shape[0], X.shape[1], X.shape[1]))
    s0, s1 = expit(X[:, 0]), expit(X[:, 1])
    hessian[:, 0, 0] = s0 * (1.0 - s0) * _softplus(X[:, 1])
    hessian[:, 1, 1] = _softplus(X[:, 0]) * s1 * (1.0 - s1)
    hessian[:, 0, 1] = hessian[:, 1, 0] = s0 * s1
    return hessian

def _squared_sum_softplus(X: Array) -> Array:
    return _softplus(X).sum(axis=1) ** 2

def _squared_sum_softplus_gradient(X: Array) -> Array:
    return 2.0 * _softplus(X).sum(axis=1)[:, None] * expit(X)

def _squared_sum_softplus_hessian(X: Array) -> Array:
    s = expit(X)
    total = _softplus(X).sum(axis=1)
    return 2.0 * (s[:, :, None] * s[:, None, :] + (total[:, None] * s * (1.0 - s))[:, :, None] * np.eye(X.shape[1])[None, :, :])

def _normal_density(x: Array) -> Array:
    return np.exp(-0.5 * x ** 2) / np.sqrt(2.0 * np.pi)

_CONVEX_QUADRATIC = {CONVEX, COMPONENTWISE_CONVEX, SUPERMODULAR, DIRECTIONALLY_CONVEX, CP_HESSIAN, COP_HESSIAN}
_LINEAR = {CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, SUPERMODULAR, DIRECTIONALLY_CONVEX, CP_HESSIAN, COP_HESSIAN}

_CATALOG: List[TestFunction] = [
    _additive(
        'sum_tanh', {INCREASING, SUPERMODULAR, DELTA_MONOTONE},
        np.tanh, lambda x: 1.0 - np.tanh(x) ** 2, lambda x: -2.0 * np.tanh(x) * (1.0 - np.tanh(x) ** 2), 0,
        description="sum_i tanh(x_i)"),
    _additive(
        'sum_normal_cdf', {INCREASING, SUPERMODULAR, DELTA_MONOTONE},
        ndtr, _normal_density, lambda x: -x * _normal_density(x), 0,
        description="sum_i Phi(x_i)"),
    TestFunction(
        'smoothed_min', frozenset({INCREASING, SUPERMODULAR}), _smoothed_min, 1,
        gradient=_smoothed_min_gradient, hessian=_smoothed_min_hessian,
        description="-h log sum_i exp(-x_i / h), h = 0.25"),
    TestFunction(
        'product_normal_cdf', frozenset({INCREASING, SUPERMODULAR, DELTA_MONOTONE}),
        lambda X: np.prod(ndtr(X), axis=1), 0, description="prod_i Phi(x_i)"),
    TestFunction(
        'min_tanh', frozenset({INCREASING, SUPERMODULAR}), lambda X: np.min(np.tanh(X), axis=1), 0,
        description="min_i tanh(x_i)"),
    TestFunction(
        'positive_part_sum', frozenset({INCREASING, SUPERMODULAR, COMPONENTWISE_CONVEX, DIRECTIONALLY_CONVEX}),
        lambda X: np.maximum(X.sum(axis=1) - 0.5, 0.0), 1, description="(sum_i x_i - 0.5)^+"),
    _quadratic(
        'negative_sample_variance', {SUPERMODULAR}, _negative_sample_variance, min_dim=2,
        description="-1/(n-1) sum_i (x_i - mean(x))^2"),
    TestFunction(
        'running_maximum', frozenset({INCREASING, SUPERMODULAR, COMPONENTWISE_CONVEX, DIRECTIONALLY_CONVEX}),
        _running_maximum, 1, description="max_k (x_1 + ... + x_k)"),
    _survival_indicator(0.0),
    _survival_indicator(-0.5),
    _survival_indicator(0.5),
    _smoothed_survival(0.0),
    _smoothed_survival(0.5),
    _ridge(
        'sum_squared', _LINEAR, _ones, np.square, lambda t: 2.0 * t, lambda t: 2.0 * np.ones_like(t), 2,
        description="(sum_i x_i)^2"),
    TestFunction(
        'logsumexp', frozenset({INCREASING, CONVEX}), lambda X: logsumexp(X, axis=1), 1,
        gradient=lambda X: softmax(X, axis=1), hessian=_logsumexp_hessian,
        description="log sum_i exp(x_i)"),
    _ridge(
        'squared_linear_form', {CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, COP_HESSIAN}, _alternating,
        np.square, lambda t: 2.0 * t, lambda t: 2.0 * np.ones_like(t), 2,
        description="(x_1 - 0.5 x_2 + x_3 - ...)^2"),
    _ridge(
        'softplus_sum', _LINEAR | {INCREASING}, _ones,
        _softplus, expit, lambda t: expit(t) * (1.0 - expit(t)), 1, description="softplus(sum_i x_i)"),
    _ridge(
        'logcosh_linear_form', {CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, COP_HESSIAN}, _alternating,
        lambda t: np.logaddexp(t, -t) - np.log(2.0), np.tanh, lambda t: 1.0 - np.tanh(t) ** 2, 1,
        description="log cosh(x_1 - 0.5 x_2 + x_3 - ...)"),
    _ridge(
        'softplus_linear_form', {CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, COP_HESSIAN}, _alternating,
        _softplus, expit, lambda t: expit(t) * (1.0 - expit(t)), 1,
        description="softplus(x_1 - 0.5 x_2 + x_3 - ...)"),
    _ridge(
        'softplus_positive_form', _LINEAR | {INCREASING}, _positive_alternating,
        _softplus, expit, lambda t: expit(t) * (1.0 - expit(t)), 1,
        description="softplus(x_1 + 0.5 x_2 + x_3 + ...)"),
    _ridge(
        'linear_sum', _LINEAR | {INCREASING, DELTA_MONOTONE}, _ones,
        lambda t: t, np.ones_like, np.zeros_like, 1, description="sum_i x_i"),
    _ridge(
        'first_coordinate', _LINEAR | {INCREASING, DELTA_MONOTONE}, lambda n: _padded([1.0], n),
        lambda t: t, np.ones_like, np.zeros_like, 1, arity=1, description="x_1"),
    _ridge(
        'negative_first_coordinate', _LINEAR, lambda n: _padded([1.0], n),
        lambda t: -t, lambda t: -np.ones_like(t), np.zeros_like, 1, arity=1, description="-x_1"),
    _ridge(
        'weighted_square', _LINEAR, lambda n: _padded([1.0, 2.0], n),
        np.square, lambda t: 2.0 * t, lambda t: 2.0 * np.ones_like(t), 2, arity=2,
        description="(x_1 + 2 x_2)^2"),
    _additive(
        'sum_softplus', _CONVEX_QUADRATIC | {INCREASING, DELTA_MONOTONE}, _softplus, expit,
        lambda x: expit(x) * (1.0 - expit(x)), 1, description="sum_i softplus(x_i)"),
    _additive(
        'scaled_softplus_sum', _CONVEX_QUADRATIC | {INCREASING, DELTA_MONOTONE}, _softplus, expit,
        lambda x: expit(x) * (1.0 - expit(x)), 1, weights=lambda n: _padded([1.0, 1.0], n),
        scales=lambda n: np.where(np.arange(n) == 1, 2.0, 1.0), arity=2,
        description="softplus(x_1) + softplus(2 x_2)"),
    _additive(
        'squared_norm', _CONVEX_QUADRATIC, np.square, lambda x: 2.0 * x, lambda x: 2.0 * np.ones_like(x), 2,
        description="sum_i x_i^2"),
    TestFunction(
        'squared_sum_softplus', frozenset((_CONVEX_QUADRATIC - {CP_HESSIAN}) | {INCREASING}), _squared_sum_softplus, 2,
        gradient=_squared_sum_softplus_gradient, hessian=_squared_sum_softplus_hessian,
        description="(sum_i softplus(x_i))^2"),
    TestFunction(
        'softplus_product', frozenset({INCREASING, SUPERMODULAR, COMPONENTWISE_CONVEX, DIRECTIONALLY_CONVEX}),
        _softplus_product, 2, arity=2, gradient=_softplus_product_gradient, hessian=_softplus_product_hessian,
        description="softplus(x_1) softplus(x_2)"),
    _quadratic(
        'tridiagonal_quadratic', _CONVEX_QUADRATIC, _tridiagonal,
        description="x'Tx with T tridiagonal, 2 on the diagonal and 1 beside it"),
    _quadratic(
        'cross_product', {SUPERMODULAR, COMPONENTWISE_CONVEX, DIRECTIONALLY_CONVEX, COP_HESSIAN},
        _pair_matrix([[0.0, 0.5], [0.5, 0.0]]), arity=2, description="x_1 x_2"),
    _quadratic(
        'negative_cross_product', {COMPONENTWISE_CONVEX}, _pair_matrix([[0.0, -0.5], [-0.5, 0.0]]), arity=2,
        description="-x_1 x_2"),
    _quadratic(
        'square_minus_cross', {COMPONENTWISE_CONVEX}, _pair_matrix([[1.0, -0.5], [-0.5, 0.0]]), arity=2,
        description="x_1^2 - x_1 x_2"),
    _quadratic(
        'squared_difference', {CONVEX, LINEAR_CONVEX, COMPONENTWISE_CONVEX, COP_HESSIAN},
        _pair_matrix([[1.0, -1.0], [-1.0, 1.0]]), arity=2, description="(x_1 - x_2)^2"),
    _quadratic(
        'first_square', _LINEAR, _pair_matrix([[1.0]]), arity=1, description="x_1^2"),
]

_BY_ID: Dict[str, TestFunction] = {f.id: f for f in _CATALOG}


def all_functions() -> List[TestFunction]:
    return list(_CATALOG)

def find_function(id: str) -> TestFunction:
    if id not in _BY_ID:
        raise UnknownTestFunction(f"Your requested test function '{id}' is not available.")
    return _BY_ID[id]

def catalog_for(rel: Union[str, OrderRelation], n: int) -> List[TestFunction]:
    """The catalog members whose class tags generate the relation and that accept n coordinates."""
    rel = OrderRelation.parse(rel)
    if not isinstance(n, (int, np.integer)):
        raise TypeError(f"the 'n' specified was of wrong type {type(n)}, expected {int}.")
    if n < 1 or (n < 2 and rel not in UNIVARIATE_RELATIONS):
        raise UnsupportedArity(f"the {rel.value} catalog needs n >= 2, got n = {n}.")
    required = REQUIRED_TAGS[rel]
    functions = [f for f in _CATALOG if required <= f.classes and f.supports(n)]
    if not functions:
        raise UnsupportedArity(f"no catalog function for {rel.value} accepts n = {n}.")
    return functions

def max_with(f: TestFunction, c: float) -> TestFunction:
    """max{f, c}; supermodular whenever f is increasing and supermodular."""
    classes = f.classes & {INCREASING, SUPERMODULAR} if INCREASING in f.classes else frozenset()
    return TestFunction(
        f"max({f.id},{c:g})", frozenset(classes), lambda X: np.maximum(f.evaluate(X), c), f.degree,
        f.arity, f.min_dim, description=f"max{{{f.description or f.id}, {c:g}}}")

def compose(f: TestFunction, g: Callable[[Array], Array], name: str, increasing: bool = True,
            degree: float = None) -> TestFunction:
    """x -> f(g(x_1), ..., g(x_n)) with g a univariate monotone map applied to every coordinate."""
    classes = f.classes & {SUPERMODULAR}
    if increasing and INCREASING in f.classes:
        classes |= {INCREASING}
    return TestFunction(
        f"{f.id}({name})", frozenset(classes), lambda X: f.evaluate(g(X)), f.degree if degree is None else degree,
        f.arity, f.min_dim, description=f"{f.description or f.id} composed with {name}")


@dataclass
class ClassCheck:
    function: str
    tag: str
    passed: bool
    counterexample: Optional[Array] = None
    detail: str = ''


def _magnitude(f: TestFunction, X: Array, tol: float) -> Array:
    return tol * (1.0 + np.abs(f(X)))

def _shifted(X: Array, index: int, step) -> Array:
    shifted = X.copy()
    shifted[:, index] += step
    return shifted

def _first_failure(f: TestFunction, tag: str, X: Array, bad: Array, detail: str) -> ClassCheck:
    if not np.any(bad):
        return ClassCheck(f.id, tag, True)
    point = X[int(np.argmax(bad))]
    return ClassCheck(f.id, tag, False, point, detail)

def _check_increasing(f, X, h, tol) -> ClassCheck:
    slack = _magnitude(f, X, tol)
    for i in range(X.shape[1]):
        derivative = (f(_shifted(X, i, h)) - f(_shifted(X, i, -h))) / (2.0 * h)
        bad = derivative < -slack
        if np.any(bad):
            return _first_failure(f, INCREASING, X, bad, f"negative partial derivative in coordinate {i + 1}")
    return ClassCheck(f.id, INCREASING, True)

def _check_supermodular(f, X, h, tol, tag=SUPERMODULAR) -> ClassCheck:
    slack = _magnitude(f, X, tol)
    for i, j in itertools.combinations(range(X.shape[1]), 2):
        mixed = (f(_shifted(_shifted(X, i, h), j, h)) - f(_shifted(_shifted(X, i, h), j, -h))
                 - f(_shifted(_shifted(X, i, -h), j, h)) + f(_shifted(_shifted(X, i, -h), j, -h))) / (4.0 * h * h)
        bad = mixed < -slack
        if np.any(bad):
            return _first_failure(f, tag, X, bad, f"negative mixed difference in coordinates ({i + 1}, {j + 1})")
    return ClassCheck(f.id, tag, True)

def _check_componentwise_convex(f, X, h, tol, tag=COMPONENTWISE_CONVEX) -> ClassCheck:
    slack = _magnitude(f, X, tol)
    center = f(X)
    for i in range(X.shape[1]):
        second = (f(_shifted(X, i, h)) - 2.0 * center + f(_shifted(X, i, -h))) / (h * h)
        bad = second < -slack
        if np.any(bad):
            return _first_failure(f, tag, X, bad, f"negative second difference in coordinate {i + 1}")
    return ClassCheck(f.id, tag, True)

def _check_convex(f, X, h, tol, rank_one: bool = False) -> ClassCheck:
    tag = LINEAR_CONVEX if rank_one else CONVEX
    slack = _magnitude(f, X, tol)
    hessians = _finite_difference_hessian(f, X, np.full_like(X, h))
    eigenvalues = np.linalg.eigvalsh(0.5 * (hessians + np.transpose(hessians, (0, 2, 1))))
    bad = eigenvalues[:, 0] < -slack
    if np.any(bad):
        return _first_failure(f, tag, X, bad, "finite-difference Hessian is not positive semidefinite")
    if rank_one and X.shape[1] > 1:
        bad = eigenvalues[:, -2] > np.sqrt(slack) * (1.0 + np.abs(eigenvalues[:, -1]))
        if np.any(bad):
            return _first_failure(f, tag, X, bad, "finite-difference Hessian has rank above one")
    return ClassCheck(f.id, tag, True)

def _check_delta_monotone(f, X, tol, stream: RandomStream, max_order: int = 3) -> ClassCheck:
    slack = _magnitude(f, X, tol)
    n = X.shape[1]
    for order in range(1, min(max_order, n) + 1):
        for subset in itertools.combinations(range(n), order):
            steps = 0.05 + 0.45 * stream.uniform((X.shape[0], order))
            difference = np.zeros(X.shape[0])
            for corner in itertools.product((0, 1), repeat=order):
                shifted = X.copy()
                for position, index in enumerate(subset):
                    shifted[:, index] += corner[position] * steps[:, position]
                difference += (-1) ** (order - sum(corner)) * f(shifted)
            bad = difference < -slack
            if np.any(bad):
                return _first_failure(f, DELTA_MONOTONE, X, bad, f"negative difference of order {order} over {[i + 1 for i in subset]}")
    return ClassCheck(f.id, DELTA_MONOTONE, True)

def _check_hessian_cone(f, X, tag) -> ClassCheck:
    if f.hessian is None:
        return ClassCheck(f.id, tag, False, X[0], "no closed-form Hessian to test")
    test = is_completely_positive if tag == CP_HESSIAN else is_copositive
    for point, hessian in zip(X, f.hessian_at(X)):
        verdict = test(0.5 * (hessian + hessian.T))
        if not verdict.yes:
            return ClassCheck(f.id, tag, False, point, f"Hessian outside the cone: {verdict.note}")
    return ClassCheck(f.id, tag, True)

def numeric_class_check(f: TestFunction, tag: str, n: int = None, M: int = 200, h: float = 1e-4,
                        tol: float = 1e-6, seed: int = 0, box: float = 2.0) -> ClassCheck:
    """
    Tests the sign pattern defining a function class at M points drawn uniformly from [-box, box]^n.
    Derivative based tags use central differences with step h; the tolerance is scaled by 1 + |f(x)|.
    """
    if tag not in CLASS_TAGS:
        raise ValueError(f"unknown class tag '{tag}', expected one of {CLASS_TAGS}.")
    n = n or max(3, f.min_dim, f.arity or 1)
    if not f.supports(n):
        raise UnsupportedArity(f"{f.id} does not accept n = {n}.")
    stream = RandomStream(seed)
    X = box * (2.0 * stream.uniform((M, n)) - 1.0)
    if tag == INCREASING:
        return _check_increasing(f, X, h, tol)
    if tag == SUPERMODULAR:
        return _check_supermodular(f, X, h, tol)
    if tag == COMPONENTWISE_CONVEX:
        return _check_componentwise_convex(f, X, h, tol)
    if tag == DIRECTIONALLY_CONVEX:
        result = _check_supermodular(f, X, h, tol, DIRECTIONALLY_CONVEX)
        return result if not result.passed else _check_componentwise_convex(f, X, h, tol, DIRECTIONALLY_CONVEX)
    if tag == CONVEX:
        return _check_convex(f, X, h, tol)
    if tag == LINEAR_CONVEX:
        return _check_convex(f, X, h, tol, rank_one=True)
    if tag == DELTA_MONOTONE:
        return _check_delta_monotone(f, X, tol, stream)
    return _check_hessian_cone(f, X, tag)
