"""Radial profiles sum c e^(sigma rho^2/4) rho^m and their operator calculus.

sigma is rational: +-lam for the lam-twisted characterization, 0 for
pure powers. Coefficients stay exact; floats only appear when sampling.
"""
import logging
import math
from fractions import Fraction

import numpy as np

from twistmean.core import ComplexRational, TwistException, \
    E_CONTRACT, E_FORMAT

LOGGER = logging.getLogger(__name__)

ILL_CONDITIONED = 1e12


class RadialProfile(object):
    """Finite sum of c e^(sigma rho^2/4) rho^m, one term per (sigma, m)"""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        """Build from an iterable of (sigma, m, c)."""
        self._terms = {}
        for sigma, m, coeff in terms or ():
            key = (Fraction(sigma), int(m))
            coeff = ComplexRational.coerce(coeff)
            total = self._terms.get(key)
            coeff = coeff if total is None else total + coeff
            if coeff:
                self._terms[key] = coeff
            elif total is not None:
                del self._terms[key]

    @classmethod
    def _raw(cls, terms):
        res = cls()
        res._terms = {key: coeff for key, coeff in terms.items() if coeff}
        return res

    @classmethod
    def term(cls, sigma, m, coeff=1):
        """The single term c e^(sigma rho^2/4) rho^m."""
        return cls([(sigma, m, coeff)])

    @classmethod
    def constant(cls, coeff=1):
        """The constant profile."""
        return cls([(0, 0, coeff)])

    def items(self):
        """Terms as ((sigma, m), c), sorted by sigma then m."""
        return sorted(self._terms.items())

    def is_zero(self):
        """True for the zero profile."""
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, RadialProfile):
            return NotImplemented
        return self._terms == other._terms

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        parts = ["({})e^({}r^2/4)r^{}".format(complex(coeff), sigma, m)
                 for (sigma, m), coeff in self.items()]
        return "RadialProfile({})".format(" + ".join(parts) or "0")

    def __add__(self, other):
        res = dict(self._terms)
        for key, coeff in other._terms.items():
            total = res.get(key)
            res[key] = coeff if total is None else total + coeff
        return RadialProfile._raw(res)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if not isinstance(other, RadialProfile):
            return self.scale(other)
        res = {}
        for (sigma1, m1), coeff1 in self._terms.items():
            for (sigma2, m2), coeff2 in other._terms.items():
                key = (sigma1 + sigma2, m1 + m2)
                prod = coeff1 * coeff2
                total = res.get(key)
                res[key] = prod if total is None else total + prod
        return RadialProfile._raw(res)

    __rmul__ = __mul__

    def scale(self, factor):
        """Multiply by an exact scalar."""
        factor = ComplexRational.coerce(factor)
        return RadialProfile._raw({key: coeff * factor
                                   for key, coeff in self._terms.items()})

    def shift(self, power):
        """Multiply by rho^power."""
        return RadialProfile._raw({(sigma, m + power): coeff
                                   for (sigma, m), coeff in
                                   self._terms.items()})

    def conjugate(self):
        """Complex conjugate profile."""
        return RadialProfile._raw({key: coeff.conjugate()
                                   for key, coeff in self._terms.items()})

    def rho_derivative(self):
        """rho d/drho maps e^(s r^2/4) r^m to (m + s r^2/2) times itself."""
        res = RadialProfile()
        for (sigma, m), coeff in self._terms.items():
            res = res + RadialProfile([(sigma, m, coeff * m),
                                       (sigma, m + 2, coeff * (sigma / 2))])
        return res

    def evaluate(self, rho):
        """Complex values on a float array of radii."""
        rho = np.asarray(rho, dtype=float)
        res = np.zeros(rho.shape, dtype=complex)
        for (sigma, m), coeff in self.items():
            res = res + complex(coeff) * \
                np.exp(float(sigma) * rho ** 2 / 4) * rho ** m
        return res


def euler_apply(a, A, sign, lam=1):
    """Apply {A (rho d/drho + sign lam rho^2/2) + 1} to a profile."""
    A = Fraction(A)
    drift = a.shift(2).scale(Fraction(sign) * Fraction(lam) / 2)
    return (a.rho_derivative() + drift).scale(A) + a


def annihilator_chain(n, p, q):
    """Factors (A, sign) in application order.

    q factors B_k = 1/(2(n+p+q-k)) with sign +1 lower H_{p,q} to H_{p,0}
    (one Zbar projection each), then p factors A_i = 1/(2(n+p-i)) with
    sign -1 lower H_{p,0} to H_{0,0}. Factors of equal sign commute; a
    factor of one sign raises the powers of the other family, so the +1
    block must act first.
    """
    if p < 0 or q < 0 or p + q < 1:
        raise TwistException("Annihilator chain needs p+q >= 1, got ({},{})"
                             .format(p, q), E_CONTRACT)
    chain = [(Fraction(1, 2 * (n + p + q - k)), 1) for k in range(1, q + 1)]
    chain += [(Fraction(1, 2 * (n + p - i)), -1) for i in range(1, p + 1)]
    return chain


def apply_chain(a, chain, lam=1):
    """Apply the composite operator, first factor innermost."""
    for A, sign in chain:
        a = euler_apply(a, A, sign, lam)
    return a


def characterization_basis(n, p, q, lam=1, two_sided=False):
    """Profiles spanning the admissible coefficients of H_{p,q}.

    e^(lam rho^2/4) rho^(-2(p+q+n-i)) for i <= p and
    e^(-lam rho^2/4) rho^(-2(p+q+n-k)) for k <= q; the two-sided form
    truncates both sums to min(p, q).
    """
    if p + q < 1:
        return []
    top_i = min(p, q) if two_sided else p
    top_k = min(p, q) if two_sided else q
    lam = Fraction(lam)
    basis = [RadialProfile.term(lam, -2 * (p + q + n - i))
             for i in range(1, top_i + 1)]
    basis += [RadialProfile.term(-lam, -2 * (p + q + n - k))
              for k in range(1, top_k + 1)]
    return basis


def euclidean_basis(d, k):
    """Powers rho^(k-d-2i), i < k, spanning degree-k coefficients on R^d."""
    return [RadialProfile.term(0, k - d - 2 * i) for i in range(k)]


def profile_label(profile):
    """Short text label like 'e+1 r^-6' for a single term profile."""
    parts = []
    for (sigma, m), coeff in profile.items():
        factor = "" if coeff == 1 else "({})".format(complex(coeff))
        sign = "+" if sigma > 0 else ""
        parts.append("{}e{}{} r^{}".format(factor, sign, sigma, m)
                     if sigma else "{}r^{}".format(factor, m))
    return " + ".join(parts) or "0"


class SampledProfile(object):
    """Complex samples on a strictly increasing radius grid"""

    def __init__(self, grid, values, lower=None, upper=None):
        """Initialize and check the grid (inside (lower, upper) if given)"""
        self.grid = np.asarray(grid, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise TwistException("Grid and values differ in shape",
                                 E_FORMAT)
        if len(self.grid) > 1 and np.any(np.diff(self.grid) <= 0):
            raise TwistException("Radius grid is not strictly increasing",
                                 E_CONTRACT)
        if lower is not None and len(self.grid) and \
                (self.grid[0] <= lower or
                 (upper is not None and self.grid[-1] >= upper)):
            raise TwistException("Radius grid leaves the annulus ({}, {})"
                                 .format(lower, upper), E_CONTRACT)

    def __len__(self):
        return len(self.grid)

    @classmethod
    def from_profile(cls, profile, grid):
        """Sample an exact profile."""
        return cls(grid, profile.evaluate(grid))

    def weighted(self, factor):
        """Samples multiplied pointwise by a float array."""
        return SampledProfile(self.grid, self.values * factor)


class ProfileFit(object):
    """Least squares fit of a sampled profile against a basis"""

    def __init__(self, coefficients, residual, conditioning, basis):
        """Initialize from the fit numbers"""
        self.coefficients = [complex(c) for c in coefficients]
        self.residual = float(residual)
        self.conditioning = float(conditioning)
        self.basis = list(basis)
        self.ill_conditioned = self.conditioning > ILL_CONDITIONED


def fit_profile(samples, basis, floor=0.0):
    """Fit samples against basis profiles after sup-norm column scaling.

    The relative residual is |misfit| / max(|samples|, floor); floor 0
    keeps the plain ratio, which is 0 when all samples vanish.
    """
    basis = list(basis)
    values = samples.values
    if basis and len(values) < 2 * len(basis):
        raise TwistException("{} samples cannot fit {} profiles".format(
            len(values), len(basis)), E_CONTRACT)

    norm = float(np.linalg.norm(values))
    denominator = max(norm, float(floor))
    if norm == 0:
        return ProfileFit([0j] * len(basis), 0.0, 1.0, basis)
    if not basis:
        return ProfileFit([], norm / denominator, 1.0, basis)

    design = np.stack([profile.evaluate(samples.grid) for profile in basis],
                      axis=1)
    scales = np.max(np.abs(design), axis=0)
    scales[scales == 0] = 1.0
    normalized = design / scales

    solution, dummy, dummy, singular = np.linalg.lstsq(normalized, values,
                                                       rcond=None)
    if singular[-1] > 0:
        conditioning = singular[0] / singular[-1]
    else:
        conditioning = math.inf
    misfit = values - normalized @ solution
    fit = ProfileFit(solution / scales, np.linalg.norm(misfit) / denominator,
                     conditioning, basis)

    if fit.ill_conditioned:
        LOGGER.warning("profile fit is ill-conditioned (cond %.3g)",
                       conditioning)
    return fit
