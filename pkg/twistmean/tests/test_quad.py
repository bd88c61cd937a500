import unittest
from fractions import Fraction

import numpy as np

from twistmean import library
from twistmean.core import TwistException, E_SAMPLER, E_CONTRACT, \
    E_DIMENSION
from twistmean.helper import multi_indices
from twistmean.poly import monomial, evaluate_many, norm_squared
from twistmean.quad import build_sphere_rule, monomial_sphere_integral, \
    default_order, FunctionSampler, spherical_mean, twisted_mean, \
    left_twisted_mean, euclidean_mean, low_discrepancy_directions, \
    sample_points, DEFAULT_ORDERS, LEFT, SphereRule


def _poly_sampler(P):
    return FunctionSampler(P.n, lambda points: evaluate_many(P, points))


class TwistQuadTestCase(unittest.TestCase):
    """Tests for `quad.py`."""

    def test_monomial_integral(self):
        """Is the integral of |w1|^4 over the sphere in C^2 equal to 1/3?"""
        self.assertEqual(monomial_sphere_integral(2, (2, 0), (2, 0)),
                         Fraction(1, 3))
        self.assertEqual(monomial_sphere_integral(2, (1, 0), (0, 1)), 0)
        self.assertEqual(monomial_sphere_integral(3, (0, 0, 0), (0, 0, 0)), 1)

    def test_default_order(self):
        self.assertEqual(default_order(1), DEFAULT_ORDERS[1])
        self.assertEqual(default_order(3), 12)
        self.assertEqual(default_order(2, 2, 1, gaussian=True), 22)

    def test_rule_shape(self):
        rule = build_sphere_rule(2, 2.5, 8)
        self.assertAlmostEqual(float(np.sum(rule.weights)), 1.0, places=14)
        self.assertTrue(np.allclose(np.linalg.norm(rule.nodes, axis=1), 2.5))
        self.assertEqual(rule.real_nodes().shape, (len(rule), 4))
        self.assertIs(build_sphere_rule(2, 1, 8), build_sphere_rule(2, 1, 8))

    def test_rule_errors(self):
        self.assertRaises(TwistException, build_sphere_rule, 0, 1.0, 8)
        self.assertRaises(TwistException, build_sphere_rule, 2, 1.0, 0)
        with self.assertRaises(TwistException) as ctx:
            build_sphere_rule(2, 1.0, 8).scaled(-1)
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)

    def test_rule_exactness(self):
        """Rules integrate every monomial up to their order exactly."""
        for n, order in ((1, 10), (2, 8), (3, 4)):
            rule = build_sphere_rule(n, 1.0, order)
            for total in range(order + 1):
                for p in range(total + 1):
                    for alpha in multi_indices(n, p):
                        for beta in multi_indices(n, total - p):
                            values = evaluate_many(monomial(n, alpha, beta),
                                                   rule.nodes)
                            exact = float(monomial_sphere_integral(
                                n, alpha, beta))
                            self.assertAlmostEqual(rule.integrate(values),
                                                   exact, places=12)

    def test_factored_monomial_integral(self):
        """Product sums agree with node evaluation, also after scaling."""
        rule = build_sphere_rule(2, 1.7, 8)
        plain = SphereRule(2, rule.radius, rule.order, rule.nodes,
                           rule.weights)
        self.assertIsNone(plain.factors)
        for alpha, beta in (((1, 0), (1, 0)), ((2, 1), (0, 3)),
                            ((3, 0), (1, 2)), ((0, 0), (0, 0))):
            values = evaluate_many(monomial(2, alpha, beta), rule.nodes)
            direct = rule.integrate(values)
            self.assertAlmostEqual(rule.monomial_integral(alpha, beta),
                                   direct, places=12)
            self.assertAlmostEqual(plain.monomial_integral(alpha, beta),
                                   direct, places=12)
        self.assertAlmostEqual(rule.monomial_integral((2, 0), (2, 0)),
                               1.7 ** 4 / 3, places=12)

    def test_mean_at_origin_ignores_lambda(self):
        f = library.thm33(2, 1, 1, 1)
        rule = build_sphere_rule(2, 2.0, 16)
        self.assertEqual(twisted_mean(f, np.zeros(2), 2.0, 1, rule),
                         twisted_mean(f, np.zeros(2), 2.0, 2, rule))

    def test_radial_function_has_equal_sides(self):
        """Left and right means of a radial f coincide."""
        f = library.gaussian(1)
        z = np.array([0.3 + 0.2j])
        rule = build_sphere_rule(1, 1.5, 64)
        self.assertAlmostEqual(left_twisted_mean(f, z, 1.5, 1, rule),
                               twisted_mean(f, z, 1.5, 1, rule), places=12)

    def test_mean_converges_with_order(self):
        f = library.thm33(2, 1, 1, 1)
        z = np.array([0.5, 0.25j])
        coarse = twisted_mean(f, z, 2.5, 1, build_sphere_rule(2, 2.5, 28))
        fine = twisted_mean(f, z, 2.5, 1, build_sphere_rule(2, 2.5, 56))
        self.assertLess(abs(coarse - fine), 1e-10)

    def test_euclidean_mean_of_square(self):
        """The mean of |x|^2 over |y| = s around x is |x|^2 + s^2."""
        g = _poly_sampler(norm_squared(2))
        x = np.array([0.5 + 0.5j, -1.0])
        rule = build_sphere_rule(2, 1.5, 6)
        self.assertAlmostEqual(euclidean_mean(g, x, 1.5, rule),
                               1.5 + 2.25, places=12)
        real = np.array([0.5, 0.5, -1.0, 0.0])
        self.assertAlmostEqual(euclidean_mean(g, real, 1.5, rule),
                               1.5 + 2.25, places=12)

    def test_twisted_mean_of_constant_at_origin(self):
        one = FunctionSampler(2, lambda points: np.ones(len(points)))
        rule = build_sphere_rule(2, 2.0, 12)
        self.assertAlmostEqual(twisted_mean(one, np.zeros(2), 2.0, 1, rule),
                               1.0, places=12)
        self.assertAlmostEqual(twisted_mean(one, np.array([1.0, 0j]), 2.0, 0,
                                            rule), 1.0, places=12)

    def test_left_mean_is_conjugate_of_right(self):
        P = monomial(2, (1, 0), (0, 2)) + monomial(2, (0, 0), (1, 0),
                                                   Fraction(1, 3))
        f = _poly_sampler(P)
        z = np.array([0.5, 0.25j])
        rule = build_sphere_rule(2, 2.0, 16)
        left = left_twisted_mean(f, z, 2.0, 1, rule)
        right = np.conj(twisted_mean(f.conjugate(), z, 2.0, 1, rule))
        self.assertAlmostEqual(left, right, places=13)
        mean, sup = spherical_mean(f, z, 2.0, 1, rule, LEFT)
        self.assertEqual(mean, left)
        self.assertGreater(sup, 0)

    def test_mean_errors(self):
        f = _poly_sampler(norm_squared(2))
        rule = build_sphere_rule(2, 2.0, 8)
        with self.assertRaises(TwistException) as ctx:
            twisted_mean(f, np.zeros(2), 1.0, 1, rule)
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)
        with self.assertRaises(TwistException) as ctx:
            twisted_mean(f, np.zeros(3), 2.0, 1, rule)
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)
        with self.assertRaises(TwistException) as ctx:
            twisted_mean(f, np.zeros(2), 2.0, 1, build_sphere_rule(1, 2.0, 8))
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)
        self.assertRaises(TwistException, spherical_mean, f, np.zeros(2),
                          2.0, 1, rule, "sideways")

    def test_sampler_fault(self):
        """A sampler that blows up reports where it happened."""
        f = FunctionSampler(1, lambda points: 1 / np.abs(points[:, 0]),
                            name="pole")
        rule = build_sphere_rule(1, 1.0, 8)
        with self.assertRaises(TwistException) as ctx:
            twisted_mean(f, np.array([rule.nodes[3, 0]]), 1.0, 1, rule)
        self.assertEqual(ctx.exception.errorcode, E_SAMPLER)
        self.assertIn("pole", str(ctx.exception))

    def test_sampler_call(self):
        f = _poly_sampler(norm_squared(2))
        self.assertAlmostEqual(f([1j, 2.0]), 5.0)
        self.assertEqual(f(np.zeros((3, 2))).shape, (3,))
        self.assertRaises(TwistException, f, [1.0])
        g = FunctionSampler.from_real(1, lambda x: x[:, 0] + 2 * x[:, 1])
        self.assertAlmostEqual(g([1 + 1j]), 3.0)

    def test_directions(self):
        directions = low_discrepancy_directions(3, 10)
        self.assertEqual(directions.shape, (10, 3))
        self.assertTrue(np.allclose(np.linalg.norm(directions, axis=1), 1.0))
        self.assertTrue(np.array_equal(directions,
                                       low_discrepancy_directions(3, 10)))
        self.assertFalse(np.array_equal(directions,
                                        low_discrepancy_directions(3, 10, 5)))
        self.assertEqual(low_discrepancy_directions(2, 0).shape, (0, 2))

    def test_sample_points(self):
        points = sample_points(2, 5, 3.0)
        self.assertEqual(points.shape, (5, 2))
        self.assertTrue(np.all(points[0] == 0))
        self.assertAlmostEqual(float(np.linalg.norm(points[-1])), 3.0)
        self.assertTrue(np.all(np.linalg.norm(points, axis=1) <= 3.0 + 1e-12))


if __name__ == '__main__':
    unittest.main()
