import math
import unittest
from fractions import Fraction

import numpy as np

from twistmean import library
from twistmean.core import TwistException, E_CONTRACT, E_DIMENSION, \
    E_EMPTY_ADMISSIBLE
from twistmean.harmonic import harmonic_space_basis
from twistmean.poly import monomial
from twistmean.quad import build_sphere_rule, LEFT
from twistmean.radial import ProfileFit, SampledProfile, RadialProfile
from twistmean.zspace import AnnulusSpec, admissible, default_grid, \
    default_center_radius, sample_pairs, membership_test, \
    extract_coefficients, characterize, two_sided_characterize, \
    euclidean_characterize, support_radius, helgason_support_check, \
    fit_verdict, FitRecord, MembershipReport, \
    CONSISTENT, INCONSISTENT, MEMBER, NON_MEMBER, INCONCLUSIVE, CLEAN, \
    NO_SUPPORT, HYPOTHESIS_VIOLATED, FLAG_DECAY_VIOLATED, \
    FLAG_DECAY_MISSING, FLAG_ILL_CONDITIONED


def _fit_record(residual, conditioning=1.0):
    samples = SampledProfile([1.0, 2.0], [0j, 0j])
    return FitRecord(1, 0, 0, ProfileFit([], residual, conditioning, []),
                     samples)


class TwistGeometryTestCase(unittest.TestCase):
    """Tests for the annulus geometry in `zspace.py`."""

    def test_annulus(self):
        ann = AnnulusSpec(2, 1)
        self.assertFalse(ann.bounded())
        self.assertEqual(ann.to_dict(), {"n": 2, "r": 1.0, "R": "inf"})
        self.assertEqual(list(ann.contains([0.5, 1.5])), [False, True])
        self.assertTrue(AnnulusSpec(1, 0, 2).bounded())
        with self.assertRaises(TwistException) as ctx:
            AnnulusSpec(2, 2, 1)
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)
        self.assertRaises(TwistException, AnnulusSpec, 0, 1)
        self.assertRaises(TwistException, AnnulusSpec, 1, -1)

    def test_admissible_examples(self):
        unbounded = AnnulusSpec(2, 1)
        self.assertTrue(admissible(np.zeros(2), 1.5, unbounded))
        self.assertFalse(admissible(np.array([1.0, 0]), 1.5, unbounded))
        bounded = AnnulusSpec(2, 1, 4)
        self.assertTrue(admissible(np.array([0.5, 0]), 2.0, bounded))
        self.assertFalse(admissible(np.array([0.5, 0]), 3.6, bounded))
        self.assertFalse(admissible(np.zeros(2), 1.0, unbounded))

    def test_default_grid(self):
        grid = default_grid(AnnulusSpec(2, 1, 4))
        self.assertEqual(len(grid), 40)
        self.assertGreater(grid[0], 1.15)
        self.assertLess(grid[-1], 3.85)
        grid = default_grid(AnnulusSpec(2, 1), 10)
        self.assertGreater(grid[0], 1.2)
        self.assertLess(grid[-1], 5.2)
        self.assertTrue(np.all(np.diff(grid) > 0))
        self.assertEqual(default_center_radius(AnnulusSpec(1, 1, 2)), 0.45)
        self.assertEqual(default_center_radius(AnnulusSpec(1, 1)), 2.0)

    def test_pairs_stay_inside(self):
        """Every node of an admissible sphere lies in the annulus."""
        rule = build_sphere_rule(2, 1.0, 8)
        centers = np.array([[0, 0], [0.3, 0.4j], [1.0, -0.5]], dtype=complex)
        for ann in (AnnulusSpec(2, 1, 4), AnnulusSpec(2, 0.5)):
            pairs = sample_pairs(ann, centers, 4)
            self.assertTrue(pairs)
            for z, s in pairs:
                self.assertTrue(admissible(z, s, ann))
                radii = np.linalg.norm(z[None, :] - s * rule.nodes, axis=1)
                self.assertTrue(np.all(radii > ann.r - 1e-12))
                self.assertTrue(np.all(radii < ann.R + 1e-12))

    def test_pairs_skip_crowded_centers(self):
        ann = AnnulusSpec(1, 1, 2)
        self.assertEqual(sample_pairs(ann, np.array([[0.6]]), 3), [])
        self.assertEqual(len(sample_pairs(ann, np.array([[0.1]]), 3)), 3)


class TwistMembershipTestCase(unittest.TestCase):
    """Tests for the mean tests and fits in `zspace.py`."""

    def test_growing_models_are_consistent(self):
        ann = AnnulusSpec(2, 1)
        for i in (1, 2):
            report = membership_test(library.thm33(2, 2, 1, i), ann, 6, 2)
            self.assertEqual(report.verdict, CONSISTENT)
            self.assertLess(report.max_mean, 1e-8 * report.scale)
            self.assertEqual(len(report.pairs), 12)

    def test_decaying_model_is_consistent(self):
        report = membership_test(library.thm34(2, 1, 2, 2), AnnulusSpec(2, 1),
                                 6, 2)
        self.assertEqual(report.verdict, CONSISTENT)

    def test_gaussian_is_inconsistent(self):
        report = membership_test(library.gaussian(1), AnnulusSpec(1, 1), 6, 3)
        self.assertEqual(report.verdict, INCONSISTENT)
        self.assertGreater(report.max_mean, 1e-3 * report.scale)

    def test_lambda_slices(self):
        """Models built for lam are members of the lam-twisted slice."""
        ann = AnnulusSpec(1, 1)
        growing = membership_test(library.thm33(1, 1, 0, 1, lam=2), ann, 6,
                                  3, lam=2)
        self.assertEqual(growing.verdict, CONSISTENT)
        half = Fraction(1, 2)
        decaying = membership_test(library.thm34(1, 0, 1, 1, lam=half), ann,
                                   6, 3, lam=half)
        self.assertEqual(decaying.verdict, CONSISTENT)

    def test_left_means(self):
        """A growing model has vanishing right but not left means (n=1)."""
        f = library.thm33(1, 1, 0, 1)
        ann = AnnulusSpec(1, 1)
        self.assertEqual(membership_test(f, ann, 6, 3).verdict, CONSISTENT)
        self.assertEqual(membership_test(f, ann, 6, 3, side=LEFT).verdict,
                         INCONSISTENT)

    def test_membership_errors(self):
        f = library.thm33(2, 1, 0, 1)
        with self.assertRaises(TwistException) as ctx:
            membership_test(f, AnnulusSpec(1, 1))
        self.assertEqual(ctx.exception.errorcode, E_DIMENSION)
        with self.assertRaises(TwistException) as ctx:
            membership_test(f, AnnulusSpec(2, 1),
                            pairs=[(np.array([1.0, 0]), 1.5)])
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)
        with self.assertRaises(TwistException) as ctx:
            membership_test(f, AnnulusSpec(2, 1), z_samples=0)
        self.assertEqual(ctx.exception.errorcode, E_EMPTY_ADMISSIBLE)

    def test_explicit_pairs_and_centers(self):
        f = library.thm33(1, 1, 0, 1)
        ann = AnnulusSpec(1, 1)
        report = membership_test(f, ann, pairs=[(np.array([0.5j]), 2.0)])
        self.assertEqual(len(report.pairs), 1)
        self.assertEqual(report.pairs[0].s, 2.0)
        report = membership_test(f, ann, np.array([[0.2], [0.4j]]), 2)
        self.assertEqual(len(report.pairs), 4)

    def test_thread_count_does_not_change_reports(self):
        f = library.thm33(1, 2, 0, 1)
        ann = AnnulusSpec(1, 1)
        single = membership_test(f, ann, 8, 3, threads=1).to_dict()
        pooled = membership_test(f, ann, 8, 3, threads=4).to_dict()
        self.assertEqual(single, pooled)

    def test_extract_constant(self):
        f = library.constant(1)
        ann = AnnulusSpec(1, 1)
        constant = extract_coefficients(f, ann, 0, 0)
        self.assertEqual(len(constant), 1)
        self.assertTrue(np.allclose(constant[0].raw.values, 1.0))
        for record in extract_coefficients(f, ann, 1, 0):
            self.assertLess(float(np.max(np.abs(record.raw.values))), 1e-12)

    def test_extract_harmonic_monomial(self):
        """z1 zbar2 has constant normalized (1,1) coefficients."""
        f = library.structured(RadialProfile.constant(),
                               monomial(2, (1, 0), (0, 1)))
        ann = AnnulusSpec(2, 1, 3)
        rule = build_sphere_rule(2, 1.0, 8)
        records = extract_coefficients(f, ann, 1, 1, rule=rule)
        self.assertEqual(len(records), 3)
        self.assertTrue(any(np.max(np.abs(r.normalized.values)) > 0.1
                            for r in records))
        for record in records:
            values = record.normalized.values
            self.assertTrue(np.allclose(values, values[0], atol=1e-12))
        for record in extract_coefficients(f, ann, 0, 0, rule=rule):
            self.assertLess(float(np.max(np.abs(record.raw.values))), 1e-12)

    def test_extract_grid_outside(self):
        with self.assertRaises(TwistException) as ctx:
            extract_coefficients(library.constant(1), AnnulusSpec(1, 1), 0, 0,
                                 grid=[0.5, 2.0])
        self.assertEqual(ctx.exception.errorcode, E_CONTRACT)

    def test_characterize_members(self):
        ann = AnnulusSpec(1, 1)
        f = library.combination([(1, library.thm33(1, 2, 0, 1)),
                                 (3, library.thm34(1, 0, 1, 1))])
        report = characterize(f, ann, [(0, 0), (2, 0), (0, 1), (1, 0)])
        self.assertEqual(report.verdict, MEMBER)
        self.assertLess(report.max_residual, 1e-9)
        self.assertIsNotNone(report.fit_for(2, 0))
        self.assertIsNone(report.fit_for(3, 0))

    def test_characterize_perturbed(self):
        ann = AnnulusSpec(1, 1)
        report = characterize(library.perturbed(1, 2, 0, 1, Fraction(1, 100)),
                              ann, [(2, 0)])
        self.assertEqual(report.verdict, NON_MEMBER)
        self.assertGreater(report.max_residual, 1e-4)

    def test_characterize_constant(self):
        report = characterize(library.constant(1), AnnulusSpec(1, 1),
                              [(0, 0)])
        self.assertEqual(report.verdict, NON_MEMBER)
        self.assertAlmostEqual(report.fit_for(0, 0).residual, 1.0)

    def test_characterize_left(self):
        f = library.thm33(1, 1, 0, 1)
        ann = AnnulusSpec(1, 1)
        self.assertEqual(characterize(f, ann, [(1, 0)]).verdict, MEMBER)
        self.assertEqual(characterize(f, ann, [(1, 0)], side=LEFT).verdict,
                         NON_MEMBER)

    def test_fit_verdict(self):
        report = MembershipReport(AnnulusSpec(1, 1), 1,
                                  fits=[_fit_record(1e-12)])
        self.assertEqual(fit_verdict(report, 1e-8), MEMBER)
        report = MembershipReport(AnnulusSpec(1, 1), 1,
                                  fits=[_fit_record(1e-6)])
        self.assertEqual(fit_verdict(report, 1e-8), INCONCLUSIVE)
        report = MembershipReport(AnnulusSpec(1, 1), 1,
                                  fits=[_fit_record(1e-2)])
        self.assertEqual(fit_verdict(report, 1e-8), NON_MEMBER)
        report = MembershipReport(AnnulusSpec(1, 1), 1,
                                  fits=[_fit_record(1e-12, math.inf)])
        self.assertEqual(fit_verdict(report, 1e-8), INCONCLUSIVE)
        self.assertIn(FLAG_ILL_CONDITIONED, report.flags)
        self.assertEqual(report.to_dict()["fits"][0]["conditioning"], "inf")

    def test_two_sided(self):
        ann = AnnulusSpec(1, 1)
        degrees = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)]
        one_sided = two_sided_characterize(library.thm33(1, 1, 0, 1), ann,
                                           degrees)
        self.assertEqual(one_sided.verdict, NON_MEMBER)
        zero = two_sided_characterize(library.zero(1), ann, degrees)
        self.assertEqual(zero.verdict, MEMBER)
        self.assertEqual(zero.max_residual, 0.0)
        self.assertEqual(len(zero.pairs), 2 * 8 * 3)

    def test_two_sided_member_pattern(self):
        """c e^(rho^2/4) rho^-6 P + d e^(-rho^2/4) rho^-6 P on C^2."""
        P = harmonic_space_basis(2, 1, 1).elements[0]
        profile = RadialProfile([(1, -6, 1), (-1, -6, 2)])
        f = library.structured(profile, P)
        report = two_sided_characterize(f, AnnulusSpec(2, 1), [(1, 1)],
                                        z_samples=3, s_per_z=2)
        self.assertEqual(report.verdict, MEMBER)
        self.assertLess(report.max_residual, 1e-9)

    def test_euclidean_characterize(self):
        ann = AnnulusSpec(1, 1)
        dipole = euclidean_characterize(library.kelvin(1, 1, 0, 1), ann,
                                        [0, 1])
        self.assertEqual(dipole.verdict, MEMBER)
        constant = euclidean_characterize(library.constant(1), ann, [0])
        self.assertEqual(constant.verdict, NON_MEMBER)


class TwistSupportTestCase(unittest.TestCase):
    """Tests for the support scans in `zspace.py`."""

    def test_bump(self):
        report = support_radius(library.bump(1), 2.0)
        self.assertEqual(report.verdict, CLEAN)
        self.assertAlmostEqual(report.radius, 1.0, delta=0.05 + 1e-9)
        self.assertEqual(report.probe_max, 0.0)
        self.assertEqual(report.flags, [])
        self.assertTrue(report.violations())
        self.assertTrue(all(scan["r"] < report.radius
                            for scan in report.violations()))

    def test_shifted_bump(self):
        report = support_radius(library.bump(1, center=[0.5]), 2.5)
        self.assertAlmostEqual(report.radius, 1.5, delta=0.05 + 1e-9)

    def test_growing_model_violates_decay(self):
        report = support_radius(library.thm33(1, 1, 0, 1), 3.0)
        self.assertEqual(report.verdict, HYPOTHESIS_VIOLATED)
        self.assertIn(FLAG_DECAY_VIOLATED, report.flags)
        self.assertIn(FLAG_DECAY_MISSING, report.flags)
        self.assertGreater(report.probe_max, 0)

    def test_no_support(self):
        report = support_radius(library.gaussian(1), 0.5)
        self.assertEqual(report.verdict, NO_SUPPORT)
        self.assertIsNone(report.radius)
        self.assertEqual(len(report.scans), 11)
        self.assertEqual(report.to_dict()["radius"], None)

    def test_zero_two_sided(self):
        report = support_radius(library.zero(1), 1.0, two_sided=True)
        self.assertEqual(report.radius, 0.0)
        self.assertEqual(report.verdict, CLEAN)
        self.assertEqual(report.flags, [])

    def test_bump_two_sided(self):
        report = support_radius(library.bump(1), 2.0, two_sided=True)
        self.assertEqual(report.verdict, CLEAN)
        self.assertAlmostEqual(report.radius, 1.0, delta=0.05 + 1e-9)

    def test_euclidean(self):
        bump = helgason_support_check(library.bump(1), 2.0)
        self.assertAlmostEqual(bump.radius, 1.0, delta=0.05 + 1e-9)
        dipole = helgason_support_check(library.kelvin(1, 1, 0, 1), 3.0)
        self.assertEqual(dipole.verdict, HYPOTHESIS_VIOLATED)


if __name__ == '__main__':
    unittest.main()
