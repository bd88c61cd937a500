import csv
import io
import json
import unittest
from fractions import Fraction

import numpy as np

from twistmean.conversion import format_polynomial, parse_polynomial, \
    format_profile, parse_profile, format_basis, format_layers, \
    format_rule, parse_rule, format_sampled, parse_sampled, format_means, \
    report_to_json, format_coefficients
from twistmean.core import ComplexRational, TwistException, E_FORMAT, \
    E_DIMENSION, E_CONTRACT
from twistmean.harmonic import orthonormal_basis, harmonic_decompose
from twistmean.poly import monomial, BigradedPolynomial
from twistmean.quad import build_sphere_rule
from twistmean.radial import RadialProfile, SampledProfile, fit_profile, \
    characterization_basis
from twistmean.zspace import MeanRecord, FitRecord


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


class TwistConversionTest(unittest.TestCase):

    def test_format_polynomial(self):
        P = monomial(2, (1, 0), (0, 1), ComplexRational(Fraction(1, 2), 1)) \
            + monomial(2, (0, 0), (2, 0), Fraction(-3, 4))
        self.assertEqual(format_polynomial(P),
                         "(1,0|0,1) 1/2 1\n(0,0|2,0) -3/4 0\n")
        self.assertEqual(format_polynomial(BigradedPolynomial(2)), "")

    def test_parse_polynomial(self):
        """Does the polynomial parser read the term lines?"""
        text = "# z1 zbar1 - zbar2 z2/2\n(1,0|1,0) 1\n\n(0,1|0,1) -1/2 0\n"
        P = parse_polynomial(text)
        self.assertEqual(P.n, 2)
        self.assertEqual(P, monomial(2, (1, 0), (1, 0)) +
                         monomial(2, (0, 1), (0, 1), Fraction(-1, 2)))
        self.assertEqual(parse_polynomial("( 2 | 1 ) 0.25 -1"),
                         monomial(1, (2,), (1,), ComplexRational(
                             Fraction(1, 4), -1)))
        self.assertTrue(parse_polynomial("# nothing\n", n=3).is_zero())

    def test_parse_polynomial_errors(self):
        for text, code in (("", E_FORMAT), ("z1 + z2", E_FORMAT),
                           ("(1,0|1) 1", E_DIMENSION),
                           ("(1,0|0,0) one", E_FORMAT)):
            with self.assertRaises(TwistException) as ctx:
                parse_polynomial(text)
            self.assertEqual(ctx.exception.errorcode, code)
        with self.assertRaises(TwistException) as ctx:
            parse_polynomial("(1,0|0,0) 1", n=3)
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)

    def test_profile_text(self):
        profile = RadialProfile([(1, -6, 1), (-1, -6, ComplexRational(0, 2))])
        self.assertEqual(format_profile(profile), "-1 -6 0 2\n1 -6 1 0\n")
        self.assertEqual(parse_profile("# decaying\n1/2 -2 3\n"),
                         RadialProfile.term(Fraction(1, 2), -2, 3))
        self.assertEqual(parse_profile(format_profile(profile)), profile)
        for text in ("1 x 3", "1 2", "1 2 3 4 5"):
            with self.assertRaises(TwistException) as ctx:
                parse_profile(text)
            self.assertEqual(ctx.exception.errorcode, E_FORMAT)

    def test_format_basis(self):
        self.assertEqual(format_basis(orthonormal_basis(2, 1, 0)),
                         "2 1 0 2\n# 0 1/2\n(1,0|0,0) 1 0\n"
                         "# 1 1/2\n(0,1|0,0) 1 0\n")

    def test_format_layers(self):
        """z1 zbar1 on C^2 has layers (z1 zbar1 - z2 zbar2)/2 and 1/2."""
        rows = _rows(format_layers(harmonic_decompose(
            monomial(2, (1, 0), (1, 0)))))
        self.assertEqual(rows, [["k", "alpha", "beta", "re", "im"],
                                ["0", "1,0", "1,0", "1/2", "0"],
                                ["0", "0,1", "0,1", "-1/2", "0"],
                                ["1", "0,0", "0,0", "1/2", "0"]])

    def test_rule_dump(self):
        """Rule dumps read back bit for bit."""
        rule = build_sphere_rule(2, 1.5, 6)
        text = format_rule(rule)
        self.assertEqual(text.splitlines()[0], "2,1.5,6")
        loaded = parse_rule(text)
        self.assertEqual(loaded.n, 2)
        self.assertEqual(loaded.order, 6)
        self.assertTrue(np.array_equal(loaded.nodes, rule.nodes))
        self.assertTrue(np.array_equal(loaded.weights, rule.weights))

    def test_rule_dump_errors(self):
        for text in ("", "2,1.0\n", "a,b,c\n", "1,1.0,4\n1,2,3,4\n"):
            with self.assertRaises(TwistException) as ctx:
                parse_rule(text)
            self.assertEqual(ctx.exception.errorcode, E_FORMAT)

    def test_parse_sampled(self):
        samples = parse_sampled("rho,re,im\n# measured\n1.5,2,0\n2.5,1,-1\n"
                                "3.0,4\n", 1, 4)
        self.assertEqual(list(samples.grid), [1.5, 2.5, 3.0])
        self.assertEqual(list(samples.values), [2, 1 - 1j, 4])
        for text in ("1.5\n", "x,1\n"):
            with self.assertRaises(TwistException) as ctx:
                parse_sampled(text)
            self.assertEqual(ctx.exception.errorcode, E_FORMAT)
        with self.assertRaises(TwistException) as ctx:
            parse_sampled("0.5,1\n2.0,1\n", 1)
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)

    def test_format_sampled(self):
        samples = SampledProfile([1.0, 2.0], [1j, 0.5])
        self.assertEqual(format_sampled(samples),
                         "rho,re,im\n1.0,0.0,1.0\n2.0,0.5,0.0\n")
        rows = _rows(format_sampled(samples, [0, 1]))
        self.assertEqual(rows[0], ["rho", "re", "im", "fit_re", "fit_im"])
        self.assertEqual(rows[2], ["2.0", "0.5", "0.0", "1.0", "0.0"])

    def test_format_means(self):
        records = [MeanRecord([0.5 + 1j, 0], 2.0, 1e-12, 3.0)]
        self.assertEqual(_rows(format_means(records)),
                         [["z1_re", "z1_im", "z2_re", "z2_im", "s", "side",
                           "mean_re", "mean_im", "scale"],
                          ["0.5", "1.0", "0.0", "0.0", "2.0", "right",
                           "1e-12", "0.0", "3.0"]])
        self.assertEqual(format_means([]),
                         "s,side,mean_re,mean_im,scale\n")

    def test_report_to_json(self):
        text = report_to_json({"b": float("inf"),
                               "a": [np.float64(1.5), np.int64(2),
                                     np.bool_(True), float("nan")],
                               "c": {1: -float("inf")}})
        self.assertTrue(text.endswith("\n"))
        self.assertTrue(text.startswith('{\n  "a"'))
        self.assertEqual(json.loads(text), {"a": [1.5, 2, True, "nan"],
                                            "b": "inf", "c": {"1": "-inf"}})

    def test_format_coefficients(self):
        basis = characterization_basis(1, 1, 0)
        grid = np.linspace(1.5, 3.0, 4)
        samples = SampledProfile.from_profile(basis[0].scale(2), grid)
        record = FitRecord(1, 0, 0, fit_profile(samples, basis), samples)
        rows = _rows(format_coefficients([record]))
        self.assertEqual(rows[0], ["j", "rho", "re", "im", "fit_re",
                                   "fit_im"])
        self.assertEqual(len(rows), 5)
        for row in rows[1:]:
            self.assertAlmostEqual(float(row[2]), float(row[4]), places=9)


if __name__ == '__main__':
    unittest.main()
