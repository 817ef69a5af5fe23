import math
import unittest

import numpy as np

from ellorder.distribution import NormalGenerator, StudentTGenerator, RadialDiscreteGenerator
from ellorder.special import (
    NonPositiveParameter, NegativeArgument, hyp0f1, hyp0f1_array, psi_value, psi1_value,
    radial_second_moment, student_t_psi_closed_form, student_t_psi1_closed_form, student_t_radial_quadrature)
from ellorder.utils.quadrature import gauss_legendre

GENERATORS = (
    NormalGenerator(), StudentTGenerator(5.0), StudentTGenerator(9.0),
    RadialDiscreteGenerator(((0.5, 0.3), (1.5, 0.7))))


class TestSpecial(unittest.TestCase):

    def test_gauss_legendre(self):
        nodes, weights = gauss_legendre(4)
        self.assertTrue(np.all((nodes > 0.0) & (nodes < 1.0)))
        self.assertAlmostEqual(weights.sum(), 1.0, places=12)
        self.assertAlmostEqual(weights @ nodes ** 2, 1.0 / 3.0, places=12)
        nodes, weights = gauss_legendre(5, -2.0, 4.0)
        self.assertAlmostEqual(weights @ nodes ** 3, (4.0 ** 4 - 2.0 ** 4) / 4.0, places=10)
        with self.assertRaises(ValueError):
            gauss_legendre(0)
        with self.assertRaises(TypeError):
            gauss_legendre(2.0)

    def test_hyp0f1_values(self):
        self.assertEqual(hyp0f1(2.5, 0.0).value, 1.0)
        self.assertAlmostEqual(hyp0f1(0.5, -0.25).value, math.cos(1.0), places=13)
        self.assertAlmostEqual(hyp0f1(1.5, -0.25).value, math.sin(1.0), places=13)
        self.assertAlmostEqual(hyp0f1(0.5, 4.0).value, math.cosh(4.0), delta=1e-12 * math.cosh(4.0))
        result = hyp0f1(1.5, -3.0)
        self.assertGreater(result.terms_used, 1)
        self.assertLessEqual(result.truncation_bound, 1e-12 * (1.0 + abs(result.value)))
        with self.assertRaises(NonPositiveParameter):
            hyp0f1(0.0, 1.0)
        with self.assertRaises(NonPositiveParameter):
            hyp0f1(-1.5, 1.0)

    def test_hyp0f1_closed_forms(self):
        x = np.linspace(0.0, 30.0, 3001)
        z = -x ** 2 / 4.0
        np.testing.assert_allclose(hyp0f1_array(0.5, z), np.cos(x), rtol=0.0, atol=1e-10)
        with np.errstate(invalid='ignore', divide='ignore'):
            sinc = np.where(x == 0.0, 1.0, np.sin(x) / x)
        np.testing.assert_allclose(hyp0f1_array(1.5, z), sinc, rtol=0.0, atol=1e-10)
        for value in (-10.0, -16.0, -16.5, -100.0, -225.0):
            self.assertAlmostEqual(hyp0f1(0.5, value).value, math.cos(2.0 * math.sqrt(-value)), delta=1e-10)

    def test_hyp0f1_positive_connection(self):
        for value in (10.0, 49.0, 51.0, 100.0):
            x = 2.0 * math.sqrt(value)
            self.assertAlmostEqual(hyp0f1(0.5, value).value / math.cosh(x), 1.0, delta=1e-12)
            self.assertAlmostEqual(hyp0f1(1.5, value).value / (math.sinh(x) / x), 1.0, delta=1e-12)

    def test_psi_value(self):
        for gen in GENERATORS:
            for n in (1, 2, 3):
                self.assertAlmostEqual(psi_value(gen, n, 0.0), 1.0, places=12)
        self.assertAlmostEqual(psi_value(NormalGenerator(), 3, 2.0), math.exp(-1.0), places=12)
        atom = RadialDiscreteGenerator(((2.0, 1.0),))
        for u in (0.1, 1.0, 4.0, 30.0):
            self.assertAlmostEqual(psi_value(atom, 1, u), math.cos(2.0 * math.sqrt(u)), places=10)
        values = psi_value(NormalGenerator(), 2, np.array([0.0, 1.0, 2.0]))
        self.assertEqual(values.shape, (3,))
        with self.assertRaises(NegativeArgument):
            psi_value(NormalGenerator(), 2, -1.0)

    def test_student_t_closed_forms(self):
        u = np.linspace(0.0, 0.5, 26)
        for n in (1, 2, 3):
            np.testing.assert_allclose(
                student_t_radial_quadrature(9.0, n, u), student_t_psi_closed_form(9.0, u), atol=1e-6)
            np.testing.assert_allclose(
                student_t_radial_quadrature(9.0, n, u, size_biased=True), student_t_psi1_closed_form(9.0, u),
                atol=1e-6)
        u = np.linspace(0.0, 50.0, 101)
        for n in (1, 3):
            np.testing.assert_allclose(psi_value(StudentTGenerator(5.0), n, u), student_t_psi_closed_form(5.0, u))

    def test_psi1_value(self):
        u = np.linspace(0.0, 100.0, 1001)
        np.testing.assert_allclose(psi1_value(NormalGenerator(), 3, u), np.exp(-u / 2.0), atol=1e-10)
        for gen in GENERATORS:
            self.assertAlmostEqual(psi1_value(gen, 2, 0.0), 1.0, places=12)
        atom = RadialDiscreteGenerator(((1.5, 1.0),))
        for u in (0.5, 3.0, 20.0):
            self.assertAlmostEqual(psi1_value(atom, 3, u), hyp0f1(2.5, -1.5 ** 2 * u / 4.0).value, places=12)
        self.assertEqual(psi1_value(RadialDiscreteGenerator(((0.0, 1.0),)), 2, 5.0), 1.0)

    def test_derivative_relation(self):
        step = 1e-5
        u = np.linspace(step, 50.0, 101)
        for gen in GENERATORS:
            for n in (1, 2, 3):
                derivative = (psi_value(gen, n, u + step) - psi_value(gen, n, u - step)) / (2.0 * step)
                expected = -gen.second_moment(n) / (2.0 * n) * psi1_value(gen, n, u)
                np.testing.assert_allclose(derivative, expected, atol=1e-8)

    def test_monotone_decreasing(self):
        u = np.linspace(0.0, 50.0, 201)
        for gen in (NormalGenerator(), StudentTGenerator(5.0)):
            for values in (psi_value(gen, 3, u), psi1_value(gen, 3, u)):
                self.assertTrue(np.all(values <= 1.0 + 1e-12))
                self.assertTrue(np.all(values > 0.0))
                self.assertTrue(np.all(np.diff(values) <= 1e-12))

    def test_radial_second_moment(self):
        self.assertEqual(radial_second_moment(NormalGenerator(), 3), 3.0)
        self.assertAlmostEqual(radial_second_moment(StudentTGenerator(5.0), 3), 5.0)
        self.assertAlmostEqual(radial_second_moment(RadialDiscreteGenerator(((1.0, 0.5), (2.0, 0.5))), 3), 2.5)
