"""Invariant suite run by 'twistmean selftest'.

Each check returns a JSON ready entry with the measured value, its limit
and a pass flag. The unit tests run the same checks on smaller ranges.
"""
import logging
from fractions import Fraction

import numpy as np

from twistmean import library
from twistmean.fields import apply_field, project_component, \
    projected_field_closed_form, structured_term, commutation_residual
from twistmean.harmonic import harmonic_space_basis, harmonic_dimension, \
    harmonic_decompose
from twistmean.helper import multi_indices
from twistmean.poly import laplacian, variable, wirtinger, norm_squared
from twistmean.quad import build_sphere_rule, default_order, \
    monomial_sphere_integral, twisted_mean, left_twisted_mean, sample_points
from twistmean.radial import RadialProfile, annihilator_chain, apply_chain, \
    characterization_basis
from twistmean.zspace import AnnulusSpec, membership_test, characterize, \
    two_sided_characterize, support_radius, helgason_support_check, \
    CONSISTENT, MEMBER, NON_MEMBER, HYPOTHESIS_VIOLATED, FLAG_DECAY_VIOLATED

LOGGER = logging.getLogger(__name__)


def _entry(name, value, limit, passed=None):
    if passed is None:
        passed = value <= limit
    return {"name": name, "value": float(value), "limit": float(limit),
            "passed": bool(passed)}


def check_identities(max_n=3, max_degree=4):
    """Count failures of the z_j P, |z|^2 P and layer identities."""
    failures = 0
    for n in range(1, max_n + 1):
        square = norm_squared(n)
        for p in range(max_degree + 1):
            for q in range(max_degree + 1):
                for P in harmonic_space_basis(n, p, q).elements:
                    if laplacian(square * P) != P.scale(4 * (n + p + q)):
                        failures += 1
                    for j in range(1, n + 1):
                        derivative = wirtinger(P, j, True)
                        if laplacian(variable(n, j) * P) != \
                                derivative.scale(4):
                            failures += 1
                        if n + p + q > 1 and not derivative.is_zero():
                            layers = harmonic_decompose(variable(n, j) * P)
                            if layers.layer(1) != derivative.scale(
                                    Fraction(1, n + p + q - 1)):
                                failures += 1
    return _entry("exact identities", failures, 0)


def check_dimensions(max_n=3, max_degree=4):
    """Count bases whose size differs from the closed form."""
    failures = 0
    for n in range(1, max_n + 1):
        for p in range(max_degree + 1):
            for q in range(max_degree + 1):
                if len(harmonic_space_basis(n, p, q)) != \
                        harmonic_dimension(n, p, q):
                    failures += 1
    return _entry("dimension law", failures, 0)


def check_quadrature(order=12, degrees=None):
    """Largest deviation of rule integrals from the exact monomial values."""
    degrees = degrees or {1: 12, 2: 12, 3: 12}
    worst = 0.0
    for n, top in sorted(degrees.items()):
        rule = build_sphere_rule(n, 1.0, order)
        for total in range(top + 1):
            for p in range(total + 1):
                for alpha in multi_indices(n, p):
                    for beta in multi_indices(n, total - p):
                        exact = float(monomial_sphere_integral(n, alpha,
                                                               beta))
                        worst = max(worst, abs(
                            rule.monomial_integral(alpha, beta) - exact))
    return _entry("quadrature exactness", worst, 1e-12)


def check_annihilation(max_n=3, max_total=8):
    """Count basis profiles not annihilated by their chain, 1 <= p+q."""
    failures = 0
    for n in range(1, max_n + 1):
        for total in range(1, max_total + 1):
            for p in range(total + 1):
                q = total - p
                chain = annihilator_chain(n, p, q)
                for profile in characterization_basis(n, p, q):
                    if not apply_chain(profile, chain).is_zero():
                        failures += 1
    return _entry("annihilation", failures, 0)


def check_sufficiency(z_samples=20, s_per_z=5, threads=1):
    """Largest relative mean of the growing and decaying models."""
    ann = AnnulusSpec(2, 1)
    models = []
    for p, q in ((1, 0), (0, 1), (1, 1), (2, 1)):
        models += [library.thm33(2, p, q, i) for i in range(1, p + 1)]
        models += [library.thm34(2, p, q, k) for k in range(1, q + 1)]

    worst = 0.0
    verdicts = True
    for model in models:
        report = membership_test(model, ann, z_samples, s_per_z,
                                 threads=threads)
        worst = max(worst, report.max_mean / report.scale)
        verdicts = verdicts and report.verdict == CONSISTENT
    return _entry("model sufficiency", worst, 1e-8,
                  verdicts and worst < 1e-8)


def check_necessity():
    """Members fit below 1e-9, the perturbed model above 1e-4."""
    ann = AnnulusSpec(2, 1)
    member = characterize(library.thm33(2, 1, 1, 1), ann, [(1, 1)])
    perturbed = characterize(library.perturbed(2, 1, 1, 1), ann, [(1, 1)])
    passed = member.max_residual < 1e-9 and \
        perturbed.max_residual > 1e-4 and \
        member.verdict == MEMBER and perturbed.verdict == NON_MEMBER
    return {"name": "model necessity", "value": member.max_residual,
            "perturbed": perturbed.max_residual, "limit": 1e-9,
            "passed": bool(passed)}


def check_projection(max_n=3, max_degree=3):
    """Count mismatches of the projected field against its closed form."""
    failures = 0
    for n in range(1, max_n + 1):
        for p in range(1, max_degree + 1):
            for q in range(1, max_degree + 1):
                profiles = characterization_basis(n, p, q) + \
                    [RadialProfile.term(0, m) for m in (-3, 0, 2)]
                for P in harmonic_space_basis(n, p, q).elements:
                    for profile in profiles:
                        for j in range(1, n + 1):
                            f = structured_term(profile, P)
                            image = apply_field(f, j, True)
                            if project_component(image, p, q - 1) != \
                                    projected_field_closed_form(profile, P,
                                                                j, True):
                                failures += 1
                            image = apply_field(f, j, False)
                            if project_component(image, p - 1, q) != \
                                    projected_field_closed_form(profile, P,
                                                                j, False):
                                failures += 1
    return _entry("projection formula", failures, 0)


def check_commutation():
    """Largest commutation residual on the standard functions."""
    rule = build_sphere_rule(2, 2.0, default_order(2))
    z = np.array([0.3 + 0.2j, -0.1 + 0.4j])
    functions = [library.gaussian(2).structure,
                 library.thm33(2, 1, 1, 1).structure,
                 library.constant(2).structure]
    worst = 0.0
    for f in functions:
        for j in (1, 2):
            for conjugate in (True, False):
                worst = max(worst, commutation_residual(f, j, conjugate, z,
                                                        2.0, rule))
    return _entry("commutation", worst, 1e-6)


def check_conjugation(pair_count=10):
    """Largest |left mean - conj(right mean of conj f)|."""
    functions = [library.thm33(2, 1, 1, 1), library.thm34(2, 0, 1, 1),
                 library.monomial(2, (1, 0), (1, 1)), library.gaussian(2),
                 library.thm33(2, 2, 1, 2), library.thm34(2, 1, 1, 1),
                 library.thm33(2, 1, 0, 1), library.perturbed(2, 1, 1, 1),
                 library.bump(2), library.kelvin(2, 1, 0, 1)]
    centers = sample_points(2, pair_count, 1.0, seed=7)
    pairs = [(z, 2.0 + 0.1 * index) for index, z in enumerate(centers)]
    unit = build_sphere_rule(2, 1.0, 24)
    worst = 0.0
    for f in functions:
        conj = f.conjugate()
        for z, s in pairs:
            rule = unit.scaled(s)
            left = left_twisted_mean(f, z, s, 1, rule)
            right = np.conj(twisted_mean(conj, z, s, 1, rule))
            worst = max(worst, abs(left - right))
    return _entry("conjugation identity", worst, 1e-13)


def check_support(threads=1):
    """Bump radius, model flag and their Euclidean counterparts."""
    bump = support_radius(library.bump(1), 2.0, threads=threads)
    model = support_radius(library.thm33(1, 1, 0, 1), 3.0, threads=threads)
    euclid = helgason_support_check(library.bump(1), 2.0, threads=threads)
    dipole = helgason_support_check(library.kelvin(1, 1, 0, 1), 3.0,
                                    threads=threads)
    error = max(abs(bump.radius - 1.0) if bump.radius is not None else 1.0,
                abs(euclid.radius - 1.0) if euclid.radius is not None
                else 1.0)
    flagged = model.verdict == HYPOTHESIS_VIOLATED and \
        FLAG_DECAY_VIOLATED in model.flags and \
        dipole.verdict == HYPOTHESIS_VIOLATED
    return _entry("support theorems", error, 0.05 + 1e-12,
                  flagged and error <= 0.05 + 1e-12)


def check_two_sided(threads=1):
    """One-sided member fails, zero and inner bump pass (n = 1)."""
    ann = AnnulusSpec(1, 1)
    degrees = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)]
    one_sided = two_sided_characterize(library.thm33(1, 1, 0, 1), ann,
                                       degrees, threads=threads)
    zero = two_sided_characterize(library.zero(1), ann, degrees,
                                  threads=threads)
    inner = two_sided_characterize(library.bump(1, radius=0.8), ann,
                                   degrees, threads=threads)
    passed = one_sided.verdict == NON_MEMBER and zero.verdict == MEMBER \
        and inner.verdict == MEMBER
    return _entry("two-sided", 0 if passed else 1, 0, passed)


def run_selftest(threads=1):
    """Run every check; the report is independent of the thread count."""
    checks = [check_identities, check_dimensions, check_quadrature,
              check_annihilation,
              lambda: check_sufficiency(threads=threads), check_necessity,
              check_projection, check_commutation, check_conjugation,
              lambda: check_support(threads), lambda: check_two_sided(threads)]
    results = []
    for check in checks:
        entry = check()
        LOGGER.info("selftest %s: %s (%.3g, limit %.3g)", entry["name"],
                    "ok" if entry["passed"] else "FAILED", entry["value"],
                    entry["limit"])
        results.append(entry)
    return {"checks": results,
            "passed": all(entry["passed"] for entry in results)}
