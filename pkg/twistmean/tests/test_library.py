import unittest
from fractions import Fraction

import numpy as np

from twistmean import library
from twistmean.core import TwistException, E_CONFIG, E_CONTRACT, \
    E_DIMENSION
from twistmean.harmonic import harmonic_space_basis
from twistmean.poly import evaluate_many, monomial
from twistmean.radial import RadialProfile


class TwistLibraryTestCase(unittest.TestCase):
    """Tests for `library.py`."""

    def setUp(self):
        self.points = np.array([[0.4 + 0.3j, -1.2 + 0.1j],
                                [1.5, 0.5j],
                                [-0.2j, 2.0 - 1.0j]])
        self.rho = np.linalg.norm(self.points, axis=1)

    def test_growing_model_values(self):
        P = harmonic_space_basis(2, 2, 1).elements[1]
        f = library.thm33(2, 2, 1, 2, index=1)
        expected = np.exp(self.rho ** 2 / 4) * self.rho ** -6 * \
            evaluate_many(P, self.points)
        self.assertTrue(np.allclose(f(self.points), expected))
        self.assertEqual(f.structure.components(), [(2, 1)])
        self.assertEqual(f.name, "thm33")

    def test_decaying_model_values(self):
        P = harmonic_space_basis(2, 0, 2).elements[0]
        f = library.thm34(2, 0, 2, 1)
        expected = np.exp(-self.rho ** 2 / 4) * self.rho ** -6 * \
            evaluate_many(P, self.points)
        self.assertTrue(np.allclose(f(self.points), expected))

    def test_model_ranges(self):
        with self.assertRaises(TwistException) as ctx:
            library.thm33(2, 1, 1, 2)
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)
        self.assertRaises(TwistException, library.thm34, 2, 1, 0, 1)
        self.assertRaises(TwistException, library.kelvin, 2, 1, 0, 2)
        self.assertRaises(TwistException, library.thm33, 2, 1, 0, 1, 1, 5)

    def test_lam_scales_the_exponent(self):
        f = library.gaussian(2, sign=-1, lam=2)
        self.assertTrue(np.allclose(f(self.points),
                                    np.exp(-2 * self.rho ** 2 / 4)))

    def test_monomial(self):
        f = library.monomial(2, (1, 0), (1, 0))
        expected = evaluate_many(monomial(2, (1, 0), (1, 0)), self.points)
        self.assertTrue(np.allclose(f(self.points), expected))
        self.assertEqual(f.structure.components(), [(0, 0), (1, 1)])
        self.assertRaises(TwistException, library.monomial, 2, (1,), (0, 0))

    def test_bump(self):
        f = library.bump(2, radius=1.0)
        values = f(np.array([[0.0, 0.0], [0.5, 0.5j], [1.0, 0.1]]))
        self.assertAlmostEqual(values[0], np.exp(-1))
        self.assertGreater(abs(values[1]), 0)
        self.assertEqual(values[2], 0)
        self.assertEqual(sorted(f.decay), [0, 1, 2, 3, 4])
        self.assertAlmostEqual(f.decay[0], np.exp(1 / 4 - 1))
        with self.assertRaises(TwistException) as ctx:
            library.bump(2, center=[1.0])
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)
        self.assertRaises(TwistException, library.bump, 2, None, 0)

    def test_decay_bounds_hold(self):
        """The declared decay constants bound the bump."""
        f = library.bump(1, center=[0.3], radius=0.7)
        points = np.linspace(-1, 1, 201)[:, None] + 0.1j
        values = np.abs(f(points))
        radius = np.abs(points[:, 0])
        for k, constant in f.decay.items():
            self.assertTrue(np.all(radius ** k * np.exp(radius ** 2 / 4) *
                                   values <= constant * (1 + 1e-12)))

    def test_perturbed(self):
        model = library.thm33(2, 1, 1, 1)
        f = library.perturbed(2, 1, 1, 1)
        P = harmonic_space_basis(2, 1, 1).elements[0]
        extra = self.rho ** -1 * evaluate_many(P, self.points) / 1000
        self.assertTrue(np.allclose(f(self.points) - model(self.points),
                                    extra))

    def test_kelvin(self):
        f = library.kelvin(1, 1, 0, 1)
        z = np.array([[0.5 + 0.5j], [2.0]])
        self.assertTrue(np.allclose(f(z), z[:, 0] / np.abs(z[:, 0]) ** 2))

    def test_combination(self):
        structured = library.combination([(2, library.constant(2, 2)),
                                          (Fraction(-1, 2),
                                           library.gaussian(2))])
        self.assertIsNotNone(structured.structure)
        expected = 4 - np.exp(-self.rho ** 2 / 4) / 2
        self.assertTrue(np.allclose(structured(self.points), expected))
        self.assertTrue(np.allclose(library.constant(2)(self.points), 1.0))

        mixed = library.combination([(1, library.bump(2)),
                                     (1j, library.constant(2))])
        self.assertIsNone(mixed.structure)
        self.assertEqual(mixed.name, "bump+constant")
        self.assertTrue(np.allclose(
            mixed(self.points),
            library.bump(2)(self.points) + 1j))

        self.assertRaises(TwistException, library.combination, [])
        with self.assertRaises(TwistException) as ctx:
            library.combination([(1, library.zero(1)),
                                 (1, library.zero(2))])
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)

    def test_structured(self):
        f = library.structured(RadialProfile.term(0, 2), monomial(2, (0, 1),
                                                                 (0, 0)))
        self.assertTrue(np.allclose(f(self.points),
                                    self.rho ** 2 * self.points[:, 1]))

    def test_build(self):
        """Does the name and parameter lookup build the right function?"""
        f = library.build("thm33", 2, {"p": "2", "q": 1, "i": "1"})
        self.assertEqual(f.structure, library.thm33(2, 2, 1, 1).structure)
        g = library.build("gaussian", 1, {"sign": "1"}, lam=Fraction(1, 2))
        self.assertEqual(g.structure, library.gaussian(1, 1,
                                                       Fraction(1, 2))
                         .structure)
        h = library.build("gaussian", 1, {"lam": 3}, lam=Fraction(1, 2))
        self.assertEqual(h.structure, library.gaussian(1, -1, 3).structure)
        m = library.build("monomial", 2, {"alpha": "1,0", "beta": [0, 1]})
        self.assertEqual(m.structure, library.monomial(2, (1, 0),
                                                       (0, 1)).structure)
        b = library.build("bump", 2, {"center": "0.5,0;0,0",
                                      "radius": "1/2"})
        self.assertEqual(b(np.array([0.5, 0])), np.exp(-1))

    def test_build_errors(self):
        for name, params in (("nothing", {}), ("zero", {"p": 1}),
                             ("monomial", {"alpha": "1,0"})):
            with self.assertRaises(TwistException) as ctx:
                library.build(name, 2, params)
            self.assertEqual(ctx.exception.errorcode, E_CONFIG)


if __name__ == '__main__':
    unittest.main()
