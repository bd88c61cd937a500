"""The vector fields Z_j, Zbar_j on functions a(rho) P(z).

Z_j = d/dz_j - (lam/4) zbar_j and Zbar_j = d/dzbar_j + (lam/4) z_j commute
with lam-twisted spherical means. Functions are kept as finite sums of
radial profile times harmonic polynomial; |z|^2k factors are folded into
the profile.
"""
import logging
from fractions import Fraction

import numpy as np

from twistmean.core import TwistException, ONE, E_CONTRACT, E_DIMENSION
from twistmean.harmonic import harmonic_decompose
from twistmean.poly import BigradedPolynomial, variable, wirtinger, \
    bidegree, is_harmonic, evaluate_many
from twistmean.quad import FunctionSampler, twisted_mean
from twistmean.radial import RadialProfile, euler_apply

LOGGER = logging.getLogger(__name__)


def _poly_key(poly):
    return tuple((alpha, beta, coeff.re, coeff.im)
                 for (alpha, beta), coeff in poly.items())


class StructuredFunction(object):
    """Sum of profile(|z|) * P(z) with P harmonic and homogeneous.

    Canonical form: every P has leading coefficient 1 (the scalar moves
    into the profile) and equal polynomials are merged, so equal functions
    compare equal term by term.
    """

    def __init__(self, n, terms=(), check=True):
        """Initialize from (RadialProfile, BigradedPolynomial) pairs"""
        self.n = n
        merged = {}
        for profile, poly in terms:
            if poly.n != n:
                raise TwistException("Polynomial on C^{} in a function on "
                                     "C^{}".format(poly.n, n), E_DIMENSION)
            if poly.is_zero() or profile.is_zero():
                continue
            if check and not is_harmonic(poly):
                raise TwistException("Polynomial factors must be harmonic "
                                     "and homogeneous", E_CONTRACT)
            lead = poly.leading_term()[1]
            poly = poly.scale(ONE / lead)
            profile = profile.scale(lead)
            merged[poly] = merged.get(poly, RadialProfile()) + profile

        self.terms = tuple(sorted(
            ((profile, poly) for poly, profile in merged.items()
             if not profile.is_zero()),
            key=lambda term: (bidegree(term[1]), _poly_key(term[1]))))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, StructuredFunction):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self.n, self.terms))

    def __add__(self, other):
        return StructuredFunction(self.n, self.terms + other.terms,
                                  check=False)

    def __repr__(self):
        return "StructuredFunction({}, {})".format(self.n, list(self.terms))

    def is_zero(self):
        """True if no term survives."""
        return not self.terms

    def scale(self, factor):
        """Multiply by an exact scalar."""
        return StructuredFunction(
            self.n, [(profile.scale(factor), poly)
                     for profile, poly in self.terms], check=False)

    def conjugate(self):
        """conj(f); P in H_{p,q} turns into conj(P) in H_{q,p}."""
        return StructuredFunction(
            self.n, [(profile.conjugate(), poly.conjugate())
                     for profile, poly in self.terms], check=False)

    def components(self):
        """Sorted bidegrees present in the function."""
        return sorted({bidegree(poly) for dummy, poly in self.terms})

    def evaluate(self, points):
        """Values at the rows of an (N, n) complex array."""
        points = np.asarray(points, dtype=complex)
        rho = np.sqrt(np.sum(np.abs(points) ** 2, axis=1))
        res = np.zeros(len(points), dtype=complex)
        for profile, poly in self.terms:
            res = res + profile.evaluate(rho) * evaluate_many(poly, points)
        return res

    def sampler(self, name="structured", decay=None):
        """A FunctionSampler evaluating this function."""
        degree = max([poly.degree() for dummy, poly in self.terms] or [0])
        return FunctionSampler(self.n, self.evaluate, decay, name, self,
                               degree)


def apply_field(f, j, conjugate=False, lam=1):
    """Zbar_j f (conjugate) or Z_j f, again as a StructuredFunction.

    Zbar_j(a P) = [1/2 rho^-2 (rho a') + (lam/4) a] z_j P + a dP/dzbar_j and
    z_j P is split into harmonic layers.
    """
    sign = 1 if conjugate else -1
    quarter = Fraction(sign) * Fraction(lam) / 4
    mult = variable(f.n, j, not conjugate)

    terms = []
    for profile, poly in f.terms:
        factor = profile.rho_derivative().shift(-2).scale(Fraction(1, 2)) + \
            profile.scale(quarter)
        if not factor.is_zero():
            for k, layer in harmonic_decompose(mult * poly).layers:
                terms.append((factor.shift(2 * k), layer))
        terms.append((profile, wirtinger(poly, j, conjugate)))

    return StructuredFunction(f.n, terms, check=False)


def project_component(f, p, q):
    """The terms of f whose polynomial lies in H_{p,q}."""
    return StructuredFunction(
        f.n, [(profile, poly) for profile, poly in f.terms
              if bidegree(poly) == (p, q)], check=False)


def projected_field_closed_form(profile, P, j, conjugate=True, lam=1):
    """[{(1/(2(n+p+q-1)))(rho d/drho +- lam rho^2/2) + 1} a] dP.

    dP is dP/dzbar_j (sign +, the (p, q-1) part of Zbar_j(aP)) or dP/dz_j
    (sign -, the (p-1, q) part of Z_j(aP)).
    """
    n = P.n
    p, q = bidegree(P)
    derivative = wirtinger(P, j, conjugate)
    if derivative.is_zero():
        return StructuredFunction(n)

    A = Fraction(1, 2 * (n + p + q - 1))
    sign = 1 if conjugate else -1
    return StructuredFunction(
        n, [(euler_apply(profile, A, sign, lam), derivative)], check=False)


def commutation_sides(f, j, conjugate, z, s, rule, lam=1, step=1e-4):
    """(Z(f x mu_s)(z), (Zf) x mu_s(z)); left by central differences."""
    sampler = f.sampler()
    center = np.asarray(z, dtype=complex).reshape(-1)
    unit = np.zeros(f.n, dtype=complex)
    unit[j - 1] = 1.0

    def mean_at(point):
        return twisted_mean(sampler, point, s, lam, rule)

    d_x = (mean_at(center + step * unit) - mean_at(center - step * unit)) \
        / (2 * step)
    d_y = (mean_at(center + 1j * step * unit) -
           mean_at(center - 1j * step * unit)) / (2 * step)
    value = mean_at(center)

    if conjugate:
        left = (d_x + 1j * d_y) / 2 + float(lam) / 4 * center[j - 1] * value
    else:
        left = (d_x - 1j * d_y) / 2 - \
            float(lam) / 4 * np.conj(center[j - 1]) * value

    image = apply_field(f, j, conjugate, lam).sampler()
    right = twisted_mean(image, center, s, lam, rule)
    return complex(left), complex(right)


def commutation_residual(f, j, conjugate, z, s, rule, lam=1, step=1e-4):
    """|Z_j(f x mu_s)(z) - (Z_j f) x mu_s(z)|."""
    left, right = commutation_sides(f, j, conjugate, z, s, rule, lam, step)
    return abs(left - right)


def structured_term(profile, poly):
    """Single term function profile(|z|) * poly(z)."""
    return StructuredFunction(poly.n, [(profile, poly)])


def zero_function(n):
    """The zero StructuredFunction."""
    return StructuredFunction(n)


def constant_function(n, value=1):
    """The constant function as a StructuredFunction."""
    poly = BigradedPolynomial(n, [(((0,) * n, (0,) * n), 1)])
    return StructuredFunction(n, [(RadialProfile.constant(value), poly)])
