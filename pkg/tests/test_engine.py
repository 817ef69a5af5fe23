import itertools
import unittest
import warnings

import numpy as np
from scipy.optimize import linprog

from ellorder.distribution import (
    EllipticalDistribution, NormalGenerator, StudentTGenerator, RadialDiscreteGenerator,
    DimensionMismatch, GeneratorMismatch, build_equicorrelated)
from ellorder.engine import OrderRelation, Verdict, check_order, check_univariate, explain

# X <= Y in the row implies X <= Y in every listed column
IMPLICATIONS = {
    OrderRelation.ST: (OrderRelation.ICX,),
    OrderRelation.CX: (OrderRelation.LCX, OrderRelation.ICX),
    OrderRelation.SM: (OrderRelation.ISM, OrderRelation.UO, OrderRelation.DCX),
    OrderRelation.DCX: (OrderRelation.IDCX,),
    OrderRelation.CCX: (OrderRelation.ICCX,)}


def normal(mu, sigma):
    return EllipticalDistribution(mu, sigma, NormalGenerator())

def random_pair(rng: np.random.Generator, n: int = 3, zero_mean: bool = False):
    """Pairs whose dispersion increase is drawn from structured families, so every verdict occurs."""
    base = rng.normal(size=(n, n))
    sigma_x = base @ base.T + n * np.eye(n)
    kind = rng.integers(5)
    if kind == 0:
        factor = rng.normal(size=(n, 1))
        D = factor @ factor.T
    elif kind == 1:
        D = np.triu(rng.uniform(0.0, 0.5, size=(n, n)), k=1)
        D = D + D.T
    elif kind == 2:
        D = np.diag(rng.uniform(0.0, 0.5, size=n))
    elif kind == 3:
        D = np.zeros((n, n))
    else:
        D = rng.normal(scale=0.3, size=(n, n))
        D = 0.5 * (D + D.T)
    mu_x = np.zeros(n) if zero_mean else rng.normal(size=n)
    shift = rng.integers(3)
    if zero_mean or shift == 0:
        delta = np.zeros(n)
    elif shift == 1:
        delta = rng.uniform(0.0, 1.0, size=n)
    else:
        delta = rng.normal(size=n)
    return normal(mu_x, sigma_x), normal(mu_x + delta, sigma_x + D)

def simplex_grid(n: int, steps: int) -> np.ndarray:
    """Every point of the unit simplex in R^n whose coordinates are multiples of 1/steps."""
    points = []
    for cuts in itertools.combinations(range(steps + n - 1), n - 1):
        bounds = (-1,) + cuts + (steps + n - 1,)
        points.append([bounds[i + 1] - bounds[i] - 1 for i in range(n)])
    return np.array(points, dtype=float) / steps

GRID_STEPS = {2: 60, 3: 40, 4: 24, 5: 16}
GRIDS = {}


class TableOracle:
    """The order table recomputed from raw parameters with numpy; None marks a condition it cannot settle."""

    tol = 1e-7

    def __init__(self, dX: EllipticalDistribution, dY: EllipticalDistribution):
        self.n = dX.n
        self.mu_x, self.mu_y = dX.mu, dY.mu
        self.sigma_x, self.sigma_y = dX.sigma, dY.sigma
        self.delta = dY.mu - dX.mu
        self.D = dY.sigma - dX.sigma
        self.slack = self.tol * (1.0 + max(np.abs(dX.sigma).max(), np.abs(dY.sigma).max()))
        self.mean_slack = self.tol * (1.0 + max(np.abs(dX.mu).max(), np.abs(dY.mu).max()))
        self.off = ~np.eye(self.n, dtype=bool)

    def mean_equal(self):
        return bool(np.all(np.abs(self.delta) <= self.mean_slack))

    def mean_dominates(self):
        return bool(np.all(self.delta >= -self.mean_slack))

    def psd(self):
        smallest = np.linalg.eigvalsh(self.D)[0]
        if smallest >= -self.slack:
            return True
        return False if smallest < -1e-6 else None

    def nonnegative(self):
        return bool(np.all(self.D >= -self.slack))

    def copositive(self):
        if self.nonnegative() or self.psd():
            return True
        if self.n not in GRIDS:
            GRIDS[self.n] = simplex_grid(self.n, GRID_STEPS[self.n])
        grid = GRIDS[self.n]
        # a negative grid value is an exact witness; a nonnegative grid minimum proves nothing
        values = np.einsum('ki,ij,kj->k', grid, self.D, grid)
        return False if values.min() < -1e-6 else None

    def positive_kernel(self):
        result = linprog(np.zeros(self.n), A_eq=self.D, b_eq=np.zeros(self.n), bounds=[(1.0, None)] * self.n)
        return result.status == 0

    def completely_positive(self):
        if not self.nonnegative():
            return False
        psd = self.psd()
        if psd is not True:
            return psd
        if self.n <= 4:
            return True
        if np.all(np.abs(self.D[self.off]) <= self.slack) or np.linalg.matrix_rank(self.D, tol=1e-8) <= 1:
            return True
        return None

    def supermodular(self, increasing: bool):
        mean = self.mean_dominates() if increasing else self.mean_equal()
        diagonal = bool(np.all(np.abs(np.diag(self.D)) <= self.slack))
        return mean and diagonal and bool(np.all(self.D[self.off] >= -self.slack))

    def product_moments(self):
        moments_x = np.outer(self.mu_x, self.mu_x) + self.sigma_x
        moments_y = np.outer(self.mu_y, self.mu_y) + self.sigma_y
        return bool(np.all((moments_y - moments_x)[self.off] >= -self.slack))

    def expected(self, rel: OrderRelation):
        def verdict(holds):
            return None if holds is None else (Verdict.HOLDS if holds else Verdict.FAILS)
        diagonal = np.diag(self.D)
        if rel is OrderRelation.ST:
            return verdict(self.mean_dominates() and bool(np.all(np.abs(self.D) <= self.slack)))
        if rel in (OrderRelation.CX, OrderRelation.LCX):
            return verdict(self.psd() if self.mean_equal() else False)
        if rel is OrderRelation.ICX:
            if not self.mean_dominates():
                return Verdict.FAILS
            psd = self.psd()
            if psd is not False:
                return verdict(psd)
            copositive = self.copositive()
            if copositive is None:
                return None
            if not copositive or self.positive_kernel():
                return Verdict.FAILS
            return Verdict.UNDETERMINED
        if rel is OrderRelation.SM:
            return verdict(self.supermodular(False))
        if rel in (OrderRelation.ISM, OrderRelation.UO):
            if self.supermodular(True):
                return Verdict.HOLDS
            if np.all(np.abs(self.mu_x) <= self.mean_slack) and np.all(np.abs(self.mu_y) <= self.mean_slack):
                return Verdict.FAILS
            necessary = self.mean_dominates() and bool(np.all(np.abs(diagonal) <= self.slack)) and self.product_moments()
            return Verdict.UNDETERMINED if necessary else Verdict.FAILS
        if rel is OrderRelation.DCX:
            return verdict(self.mean_equal() and self.nonnegative())
        if rel is OrderRelation.IDCX:
            return verdict(self.mean_dominates() and self.nonnegative())
        if rel in (OrderRelation.CCX, OrderRelation.ICCX):
            mean = self.mean_equal() if rel is OrderRelation.CCX else self.mean_dominates()
            return verdict(mean and bool(np.all(diagonal >= -self.slack)) and bool(np.all(np.abs(self.D[self.off]) <= self.slack)))
        if rel is OrderRelation.CP:
            return verdict(self.copositive() if self.mean_equal() else False)
        return verdict(self.completely_positive() if self.mean_equal() else False)


class TestEngine(unittest.TestCase):

    def test_st_example(self):
        report = check_order(normal([0, 0], np.eye(2)), normal([1, 1], np.eye(2)), 'st')
        self.assertEqual(report.verdict, Verdict.HOLDS)
        self.assertIsNone(report.witness)
        self.assertEqual(report.relation, OrderRelation.ST)
        report = check_order(normal([1, 1], np.eye(2)), normal([0, 0], np.eye(2)), 'st')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertEqual(report.witness.entry, (1,))

    def test_sm_example(self):
        low = normal(np.zeros(3), build_equicorrelated(3, 1.0, 0.2))
        high = normal(np.zeros(3), build_equicorrelated(3, 1.0, 0.5))
        self.assertEqual(check_order(low, high, 'sm').verdict, Verdict.HOLDS)
        report = check_order(high, low, 'sm')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertEqual(report.witness.entry, (1, 2))

    def test_icx_copositive_gap(self):
        dX = normal([0, 0], np.eye(2))
        dY = normal([0, 0], [[1, 0.5], [0.5, 1]])
        report = check_order(dX, dY, 'icx')
        self.assertEqual(report.verdict, Verdict.UNDETERMINED)
        self.assertIsNone(report.witness)
        self.assertIn("Sigma_y - Sigma_x copositive: yes", report.conditions)
        self.assertEqual(check_order(dX, dY, 'cx').verdict, Verdict.FAILS)
        self.assertEqual(check_order(dX, dY, 'cp').verdict, Verdict.HOLDS)
        self.assertEqual(check_order(dX, dX, 'icx').verdict, Verdict.HOLDS)

    def test_icx_not_copositive(self):
        dX = normal([0, 0], 3.0 * np.eye(2))
        dY = normal([0, 0], [[4, -2], [-2, 4]])
        report = check_order(dX, dY, 'icx')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertEqual(report.witness.kind, 'cone')
        self.assertEqual(check_order(dX, dY, 'cp').verdict, Verdict.FAILS)

    def test_cx_example(self):
        report = check_order(normal([0, 0], np.eye(2)), normal([0.1, 0], 2.0 * np.eye(2)), 'cx')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertEqual(report.witness.description, "mu differs at index 1")
        self.assertEqual(report.witness.entry, (1,))
        report = check_order(normal([0, 0], np.eye(2)), normal([0, 0], [[1, 0.5], [0.5, 1]]), 'cx')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertIsNotNone(report.witness.vector)
        self.assertAlmostEqual(max(abs(value) for value in report.witness.vector), 1.0)

    def test_dcx_example(self):
        dX = normal([0, 0], np.eye(2))
        dY = normal([0, 0], [[1.1, 0.05], [0.05, 1.2]])
        self.assertEqual(check_order(dX, dY, 'dcx').verdict, Verdict.HOLDS)
        self.assertEqual(check_order(dY, dX, 'dcx').verdict, Verdict.FAILS)
        self.assertEqual(check_order(dX, dY, 'sm').verdict, Verdict.FAILS)

    def test_componentwise_orders(self):
        dX = normal([0, 0], [[1, 0.3], [0.3, 1]])
        dY = normal([0, 0], [[1.5, 0.3], [0.3, 1.2]])
        self.assertEqual(check_order(dX, dY, 'ccx').verdict, Verdict.HOLDS)
        shifted = normal([0.5, 0.2], [[1.5, 0.3], [0.3, 1.2]])
        self.assertEqual(check_order(dX, shifted, 'ccx').verdict, Verdict.FAILS)
        self.assertEqual(check_order(dX, shifted, 'iccx').verdict, Verdict.HOLDS)
        correlated = normal([0, 0], [[1.5, 0.5], [0.5, 1.2]])
        self.assertEqual(check_order(dX, correlated, 'ccx').verdict, Verdict.FAILS)

    def test_cop_example(self):
        dX = normal(np.zeros(3), np.eye(3))
        dY = normal(np.zeros(3), np.eye(3) + np.array([[2, 1, 0], [1, 2, 1], [0, 1, 2]]))
        self.assertEqual(check_order(dX, dY, 'cop').verdict, Verdict.HOLDS)
        dY = normal(np.zeros(3), 2.0 * np.eye(3) + np.array([[1, -0.1, 0], [-0.1, 1, 0], [0, 0, 1]]))
        report = check_order(dX, dY, 'cop')
        self.assertEqual(report.verdict, Verdict.FAILS)

    def test_cop_rounding_noise(self):
        # Y - X has an off-diagonal entry of about -5.5e-17 after subtraction
        dX = normal([0, 0], build_equicorrelated(2, 3.0, 0.1))
        dY = normal([0, 0], [[4.0, 0.3], [0.3, 4.0]])
        for rel in ('ccx', 'dcx', 'cx', 'cp', 'cop'):
            self.assertEqual(check_order(dX, dY, rel).verdict, Verdict.HOLDS, msg=rel)

    def test_increasing_supermodular(self):
        dX = normal([1, 1], [[1, 0.5], [0.5, 1]])
        dY = normal([2, 2], [[1, 0.3], [0.3, 1]])
        for rel in ('ism', 'uo'):
            report = check_order(dX, dY, rel)
            self.assertEqual(report.verdict, Verdict.UNDETERMINED)
            self.assertTrue(report.notes)
        dY = normal([2, 2], [[1, 0.7], [0.7, 1]])
        self.assertEqual(check_order(dX, dY, 'ism').verdict, Verdict.HOLDS)
        dY = normal([1, 1], [[1, -0.6], [-0.6, 1]])
        report = check_order(dX, dY, 'uo')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertIn("E(X_1 X_2) > E(Y_1 Y_2)", report.witness.description)

    def test_student_t_product_moments(self):
        gen = StudentTGenerator(5.0)
        dX = EllipticalDistribution([1, 1], [[1, 0.5], [0.5, 1]], gen)
        dY = EllipticalDistribution([1, 1], [[1, 0.2], [0.2, 1]], gen)
        report = check_order(dX, dY, 'ism')
        self.assertEqual(report.verdict, Verdict.FAILS)
        # E(X_i X_j) - E(Y_i Y_j) = (-2 phi'(0)) (0.5 - 0.2) with -2 phi'(0) = 5/3
        self.assertAlmostEqual(report.witness.value, -0.5, places=12)

    def test_univariate(self):
        def line(mu, variance):
            return normal([mu], [[variance]])
        self.assertEqual(check_univariate(line(0, 1), line(1, 1), 'st').verdict, Verdict.HOLDS)
        self.assertEqual(check_univariate(line(0, 1), line(0, 4), 'cx').verdict, Verdict.HOLDS)
        report = check_univariate(line(0, 4), line(1, 1), 'icx')
        self.assertEqual(report.verdict, Verdict.FAILS)
        self.assertEqual(report.witness.description, "scale decreases")
        self.assertEqual(check_univariate(line(0, 1), line(1, 4), 'icx').verdict, Verdict.HOLDS)
        with self.assertRaises(ValueError):
            check_univariate(line(0, 1), line(0, 4), 'sm')
        with self.assertRaises(DimensionMismatch):
            check_univariate(normal([0, 0], np.eye(2)), normal([0, 0], np.eye(2)), 'st')

    def test_reflexive(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            dX, _ = random_pair(rng)
            for rel in OrderRelation:
                self.assertEqual(check_order(dX, dX, rel).verdict, Verdict.HOLDS)

    def test_implication_lattice(self):
        rng = np.random.default_rng(2020)
        for _ in range(300):
            dX, dY = random_pair(rng)
            for rel, implied in IMPLICATIONS.items():
                if check_order(dX, dY, rel).verdict is not Verdict.HOLDS:
                    continue
                for other in implied:
                    self.assertEqual(check_order(dX, dY, other).verdict, Verdict.HOLDS, msg=f"{rel} => {other}")

    def test_antisymmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            dX, dY = random_pair(rng)
            for rel in (OrderRelation.CX, OrderRelation.SM, OrderRelation.DCX, OrderRelation.ST):
                forward = check_order(dX, dY, rel).verdict
                backward = check_order(dY, dX, rel).verdict
                if forward is Verdict.HOLDS and backward is Verdict.HOLDS:
                    np.testing.assert_allclose(dX.mu, dY.mu, atol=1e-8)
                    np.testing.assert_allclose(dX.sigma, dY.sigma, atol=1e-8)

    def test_table_conformance(self):
        decided = (OrderRelation.ST, OrderRelation.CX, OrderRelation.LCX, OrderRelation.SM, OrderRelation.DCX,
                   OrderRelation.IDCX, OrderRelation.CCX, OrderRelation.ICCX, OrderRelation.CP)
        seen = {rel: set() for rel in OrderRelation}
        for n in (2, 3, 4, 5):
            rng = np.random.default_rng(100 + n)
            for _ in range(40):
                pair = random_pair(rng, n=n, zero_mean=bool(rng.integers(4) == 0))
                for dX, dY in (pair, pair[::-1]):
                    oracle = TableOracle(dX, dY)
                    for rel in OrderRelation:
                        with warnings.catch_warnings():
                            warnings.simplefilter('ignore', RuntimeWarning)
                            actual = check_order(dX, dY, rel).verdict
                        if rel in decided:
                            self.assertNotEqual(actual, Verdict.UNDETERMINED, msg=f"{rel} n={n}")
                        expected = oracle.expected(rel)
                        if expected is None:
                            continue
                        self.assertEqual(actual, expected, msg=f"{rel} n={n}: {dX.sigma.tolist()} -> {dY.sigma.tolist()}")
                        seen[rel].add(actual)
        for rel in OrderRelation:
            self.assertIn(Verdict.HOLDS, seen[rel], msg=rel)
            self.assertIn(Verdict.FAILS, seen[rel], msg=rel)

    def test_zero_mean_decided(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            dX, dY = random_pair(rng, zero_mean=True)
            for rel in ('ism', 'uo'):
                self.assertNotEqual(check_order(dX, dY, rel).verdict, Verdict.UNDETERMINED)

    def test_bounded_support(self):
        gen = RadialDiscreteGenerator(((1.0, 0.5), (2.0, 0.5)))
        dX = EllipticalDistribution([0, 0], np.eye(2), gen)
        dY = EllipticalDistribution([1, 1], np.eye(2), gen)
        for rel in ('st', 'ism', 'uo'):
            with self.assertWarns(RuntimeWarning):
                report = check_order(dX, dY, rel)
            self.assertEqual(report.verdict, Verdict.UNDETERMINED)
            self.assertIn("bounded support", report.notes[0])
        self.assertEqual(check_order(dX, dY, 'icx').verdict, Verdict.HOLDS)

    def test_errors(self):
        with self.assertRaises(DimensionMismatch):
            check_order(normal([0, 0], np.eye(2)), normal([0, 0, 0], np.eye(3)), 'cx')
        other = EllipticalDistribution([0, 0], np.eye(2), StudentTGenerator(5.0))
        with self.assertRaises(GeneratorMismatch):
            check_order(normal([0, 0], np.eye(2)), other, 'cx')
        self.assertIs(OrderRelation.parse('SM'), OrderRelation.SM)
        self.assertIs(OrderRelation.parse(OrderRelation.CX), OrderRelation.CX)
        with self.assertRaises(ValueError):
            OrderRelation.parse('xyz')
        with self.assertRaises(TypeError):
            OrderRelation.parse(3)

    def test_explain(self):
        report = check_order(normal([0, 0], np.eye(2)), normal([1, 1], np.eye(2)), 'st')
        text = explain(report)
        self.assertTrue(text.startswith("X <=_st Y: Holds"))
        self.assertIn("usual stochastic order", text)
        self.assertIn("Theorem 3.1", text)
        report = check_order(normal([0, 0], [[1, 0.5], [0.5, 1]]), normal([0, 0], [[1, 0.2], [0.2, 1]]), 'sm')
        text = explain(report)
        self.assertIn("Fails", text)
        self.assertIn("(1, 2)", text)
        report = check_order(normal([0, 0], np.eye(2)), normal([0, 0], [[1, 0.5], [0.5, 1]]), 'icx')
        text = explain(report)
        self.assertIn("Undetermined", text)
        self.assertIn("copositive but not PSD", text)
        self.assertIn("Remark 3.1 gap", text)
        self.assertTrue(report.basis.startswith("Theorem 3.3"))
        report = check_univariate(normal([0], [[1]]), normal([0], [[2]]), 'cx')
        self.assertTrue(report.basis.startswith("Lemma 2.2"))


if __name__ == '__main__':
    unittest.main()
