from __future__ import annotations
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import ndtr
from scipy.stats import kurtosis

from .distribution import (
    EllipticalDistribution, GeneratorSpec, StudentTGenerator, DimensionMismatch, InfiniteSecondMoment,
    build_equicorrelated, build_ar1, check_comparable, interpolate, is_equicorrelated)
from .engine import OrderRelation, Verdict, check_order
from .sampler import (
    RandomStream, partition_counts, sample_coupled, sample_coupled_family, sample_elliptical,
    sample_psi1_elliptical)
from .testfn import TestFunction, UnsupportedArity, catalog_for
from .utils.messages import emit
from .utils.quadrature import gauss_legendre
from .utils.tolerance import EQUALITY_TOL, PSD_TOL
from .worker_pool import WorkerPool

THRESHOLD = 3.0
BLOCK_SIZE = 25000
KURTOSIS_WARNING = 100.0

BUILDERS: Dict[str, Callable[[int, float, float], np.ndarray]] = {
    'equicorrelated': build_equicorrelated,
    'ar1': build_ar1}


class MomentGuardTripped(ValueError):
    pass

class SupermodularPremiseUnmet(ValueError):
    pass


@dataclass
class MCEstimate:
    value: float
    std_error: float
    samples: int

    def below(self, threshold: float = THRESHOLD) -> bool:
        """True when the estimate is significantly negative."""
        return self.value < -threshold * self.std_error - 1e-12 * (1.0 + abs(self.value))


@dataclass
class FunctionEstimate:
    function: str
    estimate: MCEstimate
    flagged: bool


@dataclass
class VerificationReport:
    claim: str
    relation: str
    verdict: Optional[Verdict]
    estimates: List[FunctionEstimate]
    consistent: bool
    violations: List[str] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)
    swapped: Optional[VerificationReport] = None


@dataclass
class IdentityResult:
    function: str
    lhs: MCEstimate
    rhs: MCEstimate
    consistent: bool
    lambda_nodes: int


@dataclass
class SlepianPoint:
    rho: float
    upper: MCEstimate
    lower: MCEstimate
    min_above: MCEstimate
    max_below: MCEstimate


@dataclass
class SlepianStep:
    rho_from: float
    rho_to: float
    quantity: str
    difference: MCEstimate
    flagged: bool


@dataclass
class SlepianReport:
    builder: str
    generator: dict
    n: int
    threshold: List[float]
    level: float
    points: List[SlepianPoint]
    steps: List[SlepianStep]
    monotone: bool
    violations: List[str] = field(default_factory=list)


@dataclass
class MomentCheck:
    claim: str
    direction: str
    difference: MCEstimate
    flagged: bool


@dataclass
class MomentReport:
    checks: List[MomentCheck]
    consistent: bool
    violations: List[str] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)


class _Moments(object):
    '''Count, mean and centered sum of squares of a block of values; blocks merge pairwise.'''
    def __init__(self, count: int = 0, mean: float = 0.0, m2: float = 0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    @classmethod
    def of(cls, values: np.ndarray) -> _Moments:
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(values.size, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: _Moments) -> _Moments:
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta ** 2 * self.count * other.count / count
        return _Moments(count, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    def estimate(self) -> MCEstimate:
        return MCEstimate(self.mean, math.sqrt(self.variance / self.count) if self.count else 0.0, self.count)


def _merge(blocks: Sequence[Dict[str, _Moments]]) -> Dict[str, _Moments]:
    merged: Dict[str, _Moments] = {}
    for block in blocks:
        for key, moments in block.items():
            merged[key] = merged.get(key, _Moments()).merge(moments)
    return merged

def _required_moment(gen: GeneratorSpec, degree: float) -> Optional[str]:
    """Reason the variance of a degree-p integrand is infinite under gen, or None."""
    if isinstance(gen, StudentTGenerator) and degree > 0 and gen.nu <= 2.0 * degree:
        return f"nu = {gen.nu:g} <= {2.0 * degree:g} leaves E|f|^2 infinite for growth degree {degree:g}"
    return None


class Verifier(object):
    '''
    Monte-Carlo checks of order relations and of the inequalities that follow from them.
    All draws come from sub-streams of the stream passed in, split into blocks of BLOCK_SIZE,
    so results depend on the seed and N only, never on n_jobs.
    '''
    def __init__(self, seed: int = 42, samples: int = 100000, lambda_nodes: int = 8, n_jobs: int = 1,
                 verbose: int = 0, threshold: float = THRESHOLD):
        if not isinstance(samples, int) or samples < 2:
            raise ValueError(f"the samples specified must be an integer >= 2, got {samples}.")
        if not isinstance(lambda_nodes, int) or lambda_nodes < 1:
            raise ValueError(f"the lambda_nodes specified must be an integer >= 1, got {lambda_nodes}.")
        if not threshold > 0.0:
            raise ValueError(f"the threshold specified must be positive, got {threshold}.")
        self.seed = seed
        self.samples = samples
        self.lambda_nodes = lambda_nodes
        self.threshold = threshold
        self.verbose = verbose
        self._pool = WorkerPool(n_jobs=n_jobs, verbose=verbose)

    def _log(self, message: str, verbosity: int = 1) -> None:
        if self.verbose < verbosity:
            return
        emit(self.__class__.__name__, message)

    def _resolve(self, N: Optional[int], stream: Optional[RandomStream]) -> Tuple[int, RandomStream]:
        N = self.samples if N is None else N
        if not isinstance(N, (int, np.integer)) or N < 2:
            raise ValueError(f"the number of draws must be an integer >= 2, got {N}.")
        return int(N), RandomStream(self.seed) if stream is None else stream

    def _run_blocks(self, N: int, stream: RandomStream, block: Callable[[int, RandomStream], Dict[str, _Moments]]) -> Dict[str, _Moments]:
        counts = partition_counts(N, max(1, math.ceil(N / BLOCK_SIZE)))
        streams = stream.split(len(counts))
        self._log(f"sampling {N} draws in {len(counts)} blocks...", verbosity=2)
        return _merge(self._pool.map(lambda task: block(*task), list(zip(counts, streams))))

    def _kurtosis_diagnostic(self, name: str, values: np.ndarray) -> None:
        if values.size < 4 or np.ptp(values) == 0.0:
            return
        excess = float(kurtosis(values))
        if excess > KURTOSIS_WARNING:
            warnings.warn(f"{name}: excess kurtosis {excess:.1f}, standard errors may be unreliable.", RuntimeWarning)

    def _guard(self, gen: GeneratorSpec, f: TestFunction) -> None:
        reason = _required_moment(gen, f.degree)
        if reason is not None:
            raise MomentGuardTripped(f"{f.id}: {reason}.")

    def _paired_estimates(self, dX: EllipticalDistribution, dY: EllipticalDistribution,
                          functions: Sequence[TestFunction], N: int, stream: RandomStream) -> Dict[str, MCEstimate]:
        def block(count: int, substream: RandomStream) -> Dict[str, _Moments]:
            X, Y = sample_coupled(dX, dY, count, substream)
            differences = {f.id: f(Y) - f(X) for f in functions}
            if substream.spawn_key[-1] == 0:
                for name, values in differences.items():
                    self._kurtosis_diagnostic(name, values)
            return {name: _Moments.of(values) for name, values in differences.items()}

        merged = self._run_blocks(N, stream, block)
        return {f.id: merged[f.id].estimate() for f in functions}

    def estimate_diff(self, dX: EllipticalDistribution, dY: EllipticalDistribution, f: TestFunction,
                      N: int = None, stream: RandomStream = None) -> MCEstimate:
        """Paired estimate of E f(Y) - E f(X) from coupled draws."""
        check_comparable(dX, dY)
        if not f.supports(dX.n):
            raise UnsupportedArity(f"{f.id} does not accept n = {dX.n}.")
        self._guard(dX.gen, f)
        N, stream = self._resolve(N, stream)
        return self._paired_estimates(dX, dY, [f], N, stream)[f.id]

    def _catalog_report(self, dX: EllipticalDistribution, dY: EllipticalDistribution, rel: OrderRelation,
                        verdict: Optional[Verdict], N: int, stream: RandomStream) -> VerificationReport:
        functions, skipped = [], []
        for f in catalog_for(rel, dX.n):
            reason = _required_moment(dX.gen, f.degree)
            if reason is None:
                functions.append(f)
            else:
                self._log(f"skipping {f.id}: {reason}")
                skipped.append(f.id)
        if not functions:
            raise MomentGuardTripped(f"every {rel.value} catalog function needs moments that {dX.gen} lacks.")
        estimates = self._paired_estimates(dX, dY, functions, N, stream)
        rows = [FunctionEstimate(f.id, estimates[f.id], estimates[f.id].below(self.threshold)) for f in functions]
        violations = [row.function for row in rows if row.flagged]
        return VerificationReport(
            f"X <=_{rel.value} Y", rel.value, verdict, rows, not violations, violations, skipped)

    def verify_order_mc(self, dX: EllipticalDistribution, dY: EllipticalDistribution, rel: Union[str, OrderRelation],
                        N: int = None, stream: RandomStream = None, equality_tol: float = EQUALITY_TOL,
                        psd_tol: float = PSD_TOL) -> VerificationReport:
        """
        Estimates E f(Y) - E f(X) over the catalog of the relation. The report is consistent iff
        no estimate lies below -3 SE. When the parameters say Fails, the swapped pair is run too.
        The tolerances are handed to check_order for both directions.
        """
        rel = OrderRelation.parse(rel)
        check_comparable(dX, dY)
        N, stream = self._resolve(N, stream)
        verdict = check_order(dX, dY, rel, equality_tol, psd_tol).verdict
        main, swapped = stream.split(2)
        self._log(f"verifying X <=_{rel.value} Y (parameter verdict {verdict.value}) with {N} draws...")
        report = self._catalog_report(dX, dY, rel, verdict, N, main)
        if verdict is Verdict.FAILS:
            swapped_verdict = check_order(dY, dX, rel, equality_tol, psd_tol).verdict
            report.swapped = self._catalog_report(dY, dX, rel, swapped_verdict, N, swapped)
        self._log(f"consistent: {report.consistent}, violations: {report.violations}")
        return report

    def orthant_probability(self, dist: EllipticalDistribution, a: Sequence[float], side: str = 'upper',
                            N: int = None, stream: RandomStream = None) -> MCEstimate:
        """P(X > a) (side 'upper') or P(X <= a) (side 'lower') with its binomial standard error."""
        a = np.array(a, dtype=float, ndmin=1)
        if a.shape != (dist.n,):
            raise DimensionMismatch(f"the threshold must have length {dist.n}, got shape {a.shape}.")
        if side not in ('upper', 'lower'):
            raise ValueError(f"side must be 'upper' or 'lower', got '{side}'.")
        N, stream = self._resolve(N, stream)

        def block(count: int, substream: RandomStream) -> Dict[str, _Moments]:
            X = sample_elliptical(dist, count, substream)
            inside = np.all(X > a, axis=1) if side == 'upper' else np.all(X <= a, axis=1)
            return {side: _Moments.of(inside.astype(float))}

        p = self._run_blocks(N, stream, block)[side].mean
        return MCEstimate(p, math.sqrt(p * (1.0 - p) / N), N)

    def slepian_suite(self, builder: str, gen: GeneratorSpec, n: int, rhos: Sequence[float], a: Sequence[float],
                      N: int = None, stream: RandomStream = None, variance: float = 1.0,
                      mu: Sequence[float] = None, level: float = 0.5) -> SlepianReport:
        """
        Orthant probabilities along a grid of correlation parameters, from draws shared across the grid.
        Adjacent grid points are compared by paired differences; the report is monotone iff none
        decreases by more than 3 SE. Also reports P(min tanh(X_i) > tanh(level)) and
        P(max tanh(X_i) <= tanh(level)).
        """
        if builder not in BUILDERS:
            raise ValueError(f"unknown dispersion builder '{builder}', expected one of {list(BUILDERS)}.")
        rhos = [float(rho) for rho in rhos]
        if not rhos:
            raise ValueError("the rho grid must contain at least one value.")
        if any(later < earlier for earlier, later in zip(rhos, rhos[1:])):
            raise ValueError(f"the rho grid must be nondecreasing, got {rhos}.")
        a = np.array(a, dtype=float, ndmin=1)
        if a.shape == (1,):
            a = np.full(n, a[0])
        if a.shape != (n,):
            raise DimensionMismatch(f"the threshold must have length {n}, got shape {a.shape}.")
        mu = np.zeros(n) if mu is None else np.array(mu, dtype=float)
        dists = [EllipticalDistribution(mu, BUILDERS[builder](n, variance, rho), gen) for rho in rhos]
        N, stream = self._resolve(N, stream)
        cutoff = math.tanh(level)
        quantities = ('upper', 'lower', 'min_above', 'max_below')

        def block(count: int, substream: RandomStream) -> Dict[str, _Moments]:
            indicators = []
            for X in sample_coupled_family(dists, count, substream):
                transformed = np.tanh(X)
                indicators.append({
                    'upper': np.all(X > a, axis=1).astype(float),
                    'lower': np.all(X <= a, axis=1).astype(float),
                    'min_above': (transformed.min(axis=1) > cutoff).astype(float),
                    'max_below': (transformed.max(axis=1) <= cutoff).astype(float)})
            moments = {}
            for k, values in enumerate(indicators):
                for quantity in quantities:
                    moments[f"{k}:{quantity}"] = _Moments.of(values[quantity])
                    if k > 0:
                        moments[f"{k - 1}>{k}:{quantity}"] = _Moments.of(values[quantity] - indicators[k - 1][quantity])
            return moments

        self._log(f"slepian suite over rho = {rhos} with {N} draws...")
        merged = self._run_blocks(N, stream, block)
        points = [SlepianPoint(rho, *(merged[f"{k}:{quantity}"].estimate() for quantity in quantities)) for k, rho in enumerate(rhos)]
        steps = []
        for k in range(1, len(rhos)):
            for quantity in quantities:
                difference = merged[f"{k - 1}>{k}:{quantity}"].estimate()
                steps.append(SlepianStep(rhos[k - 1], rhos[k], quantity, difference, difference.below(self.threshold)))
        violations = [f"{step.quantity} decreases from rho={step.rho_from:g} to rho={step.rho_to:g}" for step in steps if step.flagged]
        return SlepianReport(builder, gen.to_dict(), n, a.tolist(), level, points, steps, not violations, violations)

    def identity_check(self, dX: EllipticalDistribution, dY: EllipticalDistribution, f: TestFunction,
                       K: int = None, N: int = None, stream: RandomStream = None) -> IdentityResult:
        """
        Two-sided check of
            E f(Y) - E f(X) = int_0^1 [ (mu_y - mu_x)' E grad f(X_l) + E(R^2)/(2n) E tr(D H_f(Z_l)) ] dl
        where X_l follows the interpolated law and Z_l the psi1 law with the same parameters.
        """
        check_comparable(dX, dY)
        second_moment = dX.gen.second_moment(dX.n)
        if not math.isfinite(second_moment):
            raise InfiniteSecondMoment(f"E(R^2) is not finite for {dX.gen}.")
        self._guard(dX.gen, f)
        K = self.lambda_nodes if K is None else K
        N, stream = self._resolve(N, stream)
        lhs_stream, rhs_stream = stream.split(2)
        lhs = self.estimate_diff(dX, dY, f, N, lhs_stream)
        delta = dY.mu - dX.mu
        D = dY.sigma - dX.sigma
        factor = second_moment / (2.0 * dX.n)
        nodes, weights = gauss_legendre(K)

        def node_block(count: int, substream: RandomStream, lam: float) -> Dict[str, _Moments]:
            dist = interpolate(dX, dY, lam)
            X = sample_elliptical(dist, count, substream)
            Z = sample_psi1_elliptical(dist, count, substream)
            return {
                'mean': _Moments.of(f.gradient_at(X) @ delta),
                'hessian': _Moments.of(np.einsum('ij,kij->k', D, f.hessian_at(Z)))}

        value, variance = 0.0, 0.0
        for lam, weight, node_stream in zip(nodes, weights, rhs_stream.split(K)):
            merged = self._run_blocks(N, node_stream, lambda count, substream, lam=lam: node_block(count, substream, lam))
            mean_term, hessian_term = merged['mean'], merged['hessian']
            value += weight * (mean_term.mean + factor * hessian_term.mean)
            variance += weight ** 2 * (mean_term.variance / mean_term.count + factor ** 2 * hessian_term.variance / hessian_term.count)
        rhs = MCEstimate(value, math.sqrt(variance), N * K)
        combined = math.sqrt(lhs.std_error ** 2 + rhs.std_error ** 2)
        consistent = abs(lhs.value - rhs.value) <= self.threshold * combined + 1e-9 * (1.0 + abs(lhs.value))
        self._log(f"identity check for {f.id}: lhs {lhs.value:.6g} +- {lhs.std_error:.2g}, rhs {rhs.value:.6g} +- {rhs.std_error:.2g}")
        return IdentityResult(f.id, lhs, rhs, consistent, K)

    def _moment_claims(self, dX: EllipticalDistribution) -> List[Tuple[str, str, float, Callable[[np.ndarray], np.ndarray]]]:
        """(claim, direction, growth degree, integrand); direction '<=' means E g(X) <= E g(Y)."""
        n = dX.n
        claims = [
            ('E prod Phi(X_i)', '<=', 0, lambda X: np.prod(ndtr(X), axis=1)),
            ('E min tanh(X_i)', '<=', 0, lambda X: np.tanh(X).min(axis=1)),
            ('E max tanh(X_i)', '>=', 0, lambda X: np.tanh(X).max(axis=1)),
            ('E min X_i', '<=', 1, lambda X: X.min(axis=1)),
            ('E max X_i', '>=', 1, lambda X: X.max(axis=1)),
            ('E S^2', '>=', 2, lambda X: X.var(axis=1, ddof=1)),
            ('E softplus(max_k S_k)', '<=', 1, lambda X: np.logaddexp(0.0, np.max(np.cumsum(X, axis=1), axis=1))),
            ('E (sum X_i^3)^2', '<=', 6, lambda X: np.sum(X ** 3, axis=1) ** 2),
            ('E max{prod Phi(X_i) - 2^-n, 0}', '<=', 0, lambda X: np.maximum(np.prod(ndtr(X), axis=1) - 2.0 ** -n, 0.0)),
            ('E tanh(X_1) tanh(X_2)', '<=', 0, lambda X: np.tanh(X[:, 0]) * np.tanh(X[:, 1]))]
        return claims

    def moment_suite(self, dX: EllipticalDistribution, dY: EllipticalDistribution,
                     N: int = None, stream: RandomStream = None) -> MomentReport:
        """Estimates the moment inequalities implied by X <=_sm Y and flags any reversed beyond 3 SE."""
        check_comparable(dX, dY)
        if dX.n < 2:
            raise UnsupportedArity("the moment suite needs n >= 2.")
        premise = check_order(dX, dY, OrderRelation.SM)
        if premise.verdict is not Verdict.HOLDS:
            raise SupermodularPremiseUnmet(f"the moment suite needs X <=_sm Y; parameter verdict is {premise.verdict.value}.")
        claims = self._moment_claims(dX)
        if dX.n >= 3 and is_equicorrelated(dX.sigma) and is_equicorrelated(dY.sigma):
            claims += [
                ('E X_1 X_2 X_3^2', '<=', 4, lambda X: X[:, 0] * X[:, 1] * X[:, 2] ** 2),
                ('E X_1^3 X_2^3 X_3^4', '<=', 10, lambda X: X[:, 0] ** 3 * X[:, 1] ** 3 * X[:, 2] ** 4)]
        active, skipped = [], []
        for claim in claims:
            reason = _required_moment(dX.gen, claim[2])
            if reason is None:
                active.append(claim)
            else:
                self._log(f"skipping {claim[0]}: {reason}")
                skipped.append(claim[0])
        N, stream = self._resolve(N, stream)

        def block(count: int, substream: RandomStream) -> Dict[str, _Moments]:
            X, Y = sample_coupled(dX, dY, count, substream)
            moments = {}
            for name, direction, _, integrand in active:
                difference = integrand(Y) - integrand(X)
                if substream.spawn_key[-1] == 0:
                    self._kurtosis_diagnostic(name, difference)
                moments[name] = _Moments.of(difference if direction == '<=' else -difference)
            return moments

        merged = self._run_blocks(N, stream, block)
        checks = []
        for name, direction, _, _ in active:
            oriented = merged[name].estimate()
            sign = 1.0 if direction == '<=' else -1.0
            difference = MCEstimate(sign * oriented.value, oriented.std_error, oriented.samples)
            checks.append(MomentCheck(name, direction, difference, oriented.below(self.threshold)))
        violations = [check.claim for check in checks if check.flagged]
        return MomentReport(checks, not violations, violations, skipped)
