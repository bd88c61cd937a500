"""Quadrature on spheres of C^n and the spherical mean operators.

Rules are hyperspherical product rules: each modulus split uses
Gauss-Legendre in a polar angle, each phase angle the trapezoidal rule.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from twistmean.core import TwistException, CACHE, \
    E_CONTRACT, E_DIMENSION, E_SAMPLER
from twistmean.helper import multi_factorial, fixed_order_sum, \
    complex_to_real, real_to_complex, as_point_array

LOGGER = logging.getLogger(__name__)

# rule orders used when the caller has no polynomial structure to declare
DEFAULT_ORDERS = {1: 128, 2: 56, 3: 12}

RIGHT = "right"
LEFT = "left"
EUCLIDEAN = "euclidean"
SIDES = (RIGHT, LEFT, EUCLIDEAN)


def default_order(n, p=0, q=0, gaussian=False):
    """Rule order for a dimension, or 2(p+q)+16 for polynomial-Gaussian f."""
    if gaussian:
        return 2 * (p + q) + 16
    return DEFAULT_ORDERS.get(n, 12)


class SphereRule(object):
    """Nodes and normalized weights on the sphere |w| = radius in C^n

    factors optionally holds the product structure (moduli, modulus
    weights, phase angles) the nodes were built from.
    """

    def __init__(self, n, radius, order, nodes, weights, factors=None):
        """Initialize from an (N, n) complex node array and N weights"""
        self.n = n
        self.radius = float(radius)
        self.order = order
        self.nodes = nodes
        self.weights = weights
        self.factors = factors

    def __len__(self):
        return len(self.weights)

    def scaled(self, radius):
        """The same rule moved to the sphere of the given radius."""
        if radius <= 0:
            raise TwistException("Sphere radius {} is not positive"
                                 .format(radius), E_CONTRACT)
        ratio = radius / self.radius
        factors = None
        if self.factors is not None:
            moduli, modulus_weights, theta = self.factors
            factors = (moduli * ratio, modulus_weights, theta)
        return SphereRule(self.n, radius, self.order, self.nodes * ratio,
                          self.weights, factors)

    def real_nodes(self):
        """Nodes as points of R^2n."""
        return complex_to_real(self.nodes)

    def integrate(self, values):
        """Weighted sum of node values."""
        return fixed_order_sum(self.weights * values)

    def monomial_integral(self, alpha, beta):
        """Rule value of w^alpha conj(w)^beta.

        Product rules split into a modulus sum times one phase mean per
        coordinate; other rules evaluate at every node.
        """
        alpha = tuple(alpha)
        beta = tuple(beta)
        if self.factors is None:
            values = np.ones(len(self.nodes), dtype=complex)
            for j, (a, b) in enumerate(zip(alpha, beta)):
                column = self.nodes[:, j]
                values = values * column ** a * np.conj(column) ** b
            return self.integrate(values)

        moduli, modulus_weights, theta = self.factors
        radial = np.array(modulus_weights, dtype=float)
        phase = 1.0 + 0j
        for j, (a, b) in enumerate(zip(alpha, beta)):
            radial = radial * moduli[:, j] ** (a + b)
            phase *= np.mean(np.exp(1j * (a - b) * theta))
        return fixed_order_sum(radial) * phase


def _polar_rule(m, order, n):
    """Angles and weights for |w_1| = cos(phi) on S^(2m-1)."""
    count = order + 2 * n + 2
    nodes, weights = np.polynomial.legendre.leggauss(count)
    phi = (nodes + 1) * np.pi / 4
    density = 2 * (m - 1) * np.cos(phi) * np.sin(phi) ** (2 * m - 3)
    weights = weights * np.pi / 4 * density
    return phi, weights / np.sum(weights)


def _moduli(m, order, n):
    """Moduli (K, m) with unit sum of squares and their weights."""
    if m == 1:
        return np.ones((1, 1)), np.ones(1)

    phi, weights = _polar_rule(m, order, n)
    inner, inner_weights = _moduli(m - 1, order, n)
    moduli = np.concatenate([
        np.repeat(np.cos(phi), len(inner))[:, None],
        (np.sin(phi)[:, None, None] * inner[None, :, :]).reshape(-1, m - 1)
    ], axis=1)
    return moduli, np.outer(weights, inner_weights).reshape(-1)


def _unit_rule(n, order):
    moduli, modulus_weights = _moduli(n, order, n)

    count = order + 1
    theta = 2 * np.pi * np.arange(count) / count
    grids = np.meshgrid(*([theta] * n), indexing="ij")
    angles = np.stack([grid.reshape(-1) for grid in grids], axis=1)
    phases = np.exp(1j * angles)

    nodes = (moduli[:, None, :] * phases[None, :, :]).reshape(-1, n)
    weights = np.repeat(modulus_weights, len(angles)) / len(angles)
    weights = weights / np.sum(weights)

    LOGGER.debug("sphere rule n=%d order=%d has %d nodes", n, order,
                 len(weights))
    factors = (moduli, modulus_weights / np.sum(modulus_weights), theta)
    return SphereRule(n, 1.0, order, nodes, weights, factors)


def build_sphere_rule(n, s, order):
    """Product rule on |w| = s, exact for sphere polynomials up to order."""
    if n < 1:
        raise TwistException("Dimension {} is not positive".format(n),
                             E_DIMENSION)
    if order < 1:
        raise TwistException("Rule order {} is below 1".format(order),
                             E_CONTRACT)
    unit = CACHE.get_or_compute(("rule", n, order),
                                lambda: _unit_rule(n, order))
    if s == 1:
        return unit
    return unit.scaled(s)


@lru_cache(maxsize=None)
def monomial_sphere_integral(n, alpha, beta):
    """Exact integral of w^alpha conj(w)^beta over the unit sphere.

    Zero unless alpha == beta, then (n-1)! alpha! / (n-1+|alpha|)!.
    """
    alpha = tuple(alpha)
    beta = tuple(beta)
    if alpha != beta:
        return Fraction(0)
    return Fraction(math.factorial(n - 1) * multi_factorial(alpha),
                    math.factorial(n - 1 + sum(alpha)))


class FunctionSampler(object):
    """A function on C^n evaluated on (N, n) complex point arrays.

    decay maps k to the constant C_k of |z|^k e^(|z|^2/4) |f(z)| <= C_k.
    structure optionally holds the StructuredFunction the sampler evaluates.
    """

    def __init__(self, n, evaluation, decay=None, name="f", structure=None,
                 degree=None):
        """Initialize from a vectorized evaluation callable"""
        self.n = n
        self.evaluation = evaluation
        self.decay = dict(decay) if decay else {}
        self.name = name
        self.structure = structure
        self.degree = degree

    def __call__(self, points):
        """Evaluate at one point (complex) or an (N, n) array."""
        arr = as_point_array(points, self.n)
        if arr is None:
            raise TwistException("Point dimension differs from n={}"
                                 .format(self.n), E_DIMENSION)
        values = self.sample(arr)
        if np.ndim(points) == 1:
            return complex(values[0])
        return values

    def sample(self, points):
        """Evaluate at the rows of points; faults carry the node location."""
        try:
            with np.errstate(all="ignore"):
                values = np.asarray(self.evaluation(points), dtype=complex)
        except (ArithmeticError, ValueError) as exc:
            raise TwistException("Sampler {} failed near {}: {}".format(
                self.name, _point_text(points[0]), exc), E_SAMPLER)

        values = np.broadcast_to(values, (len(points),))
        bad = np.flatnonzero(~np.isfinite(values))
        if len(bad):
            raise TwistException("Sampler {} is not finite at {}".format(
                self.name, _point_text(points[bad[0]])), E_SAMPLER)
        return values

    def conjugate(self):
        """The sampler of conj(f)."""
        evaluation = self.evaluation
        structure = self.structure.conjugate() \
            if self.structure is not None else None
        return FunctionSampler(self.n,
                               lambda points: np.conj(evaluation(points)),
                               self.decay, "conj({})".format(self.name),
                               structure, self.degree)

    @classmethod
    def from_real(cls, n, function, decay=None, name="g", degree=None):
        """Wrap g on R^2n, called with (N, 2n) arrays (x1, y1, ...)."""
        return cls(n, lambda points: function(complex_to_real(points)),
                   decay, name, None, degree)


def _point_text(point):
    return "(" + ", ".join("{:.6g}".format(complex(c)) for c in point) + ")"


def _check_rule(rule, s, n):
    if rule.n != n:
        raise TwistException("Rule lives on C^{}, function on C^{}"
                             .format(rule.n, n), E_DIMENSION)
    if abs(rule.radius - s) > 1e-12 * max(1.0, s):
        raise TwistException("Rule radius {} differs from s={}"
                             .format(rule.radius, s), E_CONTRACT)


def _center(z, n):
    center = np.asarray(z, dtype=complex).reshape(-1)
    if len(center) == 2 * n and np.all(np.isreal(center)):
        center = real_to_complex(center.real)
    if len(center) != n:
        raise TwistException("Center dimension differs from n={}".format(n),
                             E_DIMENSION)
    return center


def spherical_mean(f, z, s, lam, rule, side=RIGHT):
    """Return (mean, sup |f| on the sphere) for the requested mean.

    right: f x mu_s(z) with phase exp(i lam/2 Im(z.conj(w)))
    left: mu_s x f(z), the phase conjugated
    euclidean: plain average of f(z + w)
    """
    _check_rule(rule, s, f.n)
    center = _center(z, f.n)

    if side == EUCLIDEAN:
        values = f.sample(center[None, :] + rule.nodes)
        return rule.integrate(values), float(np.max(np.abs(values)))

    if side not in (RIGHT, LEFT):
        raise TwistException("Unknown mean side {}".format(side), E_CONTRACT)

    values = f.sample(center[None, :] - rule.nodes)
    twist = np.sum(center[None, :] * np.conj(rule.nodes), axis=1).imag
    sign = 1.0 if side == RIGHT else -1.0
    phase = np.exp(1j * sign * float(lam) / 2 * twist)
    return rule.integrate(values * phase), float(np.max(np.abs(values)))


def twisted_mean(f, z, s, lam, rule):
    """f x mu_s(z), the lam-twisted spherical mean."""
    return spherical_mean(f, z, s, lam, rule, RIGHT)[0]


def left_twisted_mean(f, z, s, lam, rule):
    """mu_s x f(z); equals conj(conj(f) x mu_s (z))."""
    return spherical_mean(f, z, s, lam, rule, LEFT)[0]


def euclidean_mean(g, x, s, rule):
    """Average of g(x + y) over |y| = s; x in C^n or R^2n."""
    return spherical_mean(g, x, s, 0, rule, EUCLIDEAN)[0]


def low_discrepancy_directions(n, count, seed=0):
    """Unit vectors of C^n from a Halton sequence pushed through ndtri.

    The seed skips that many points of the sequence.
    """
    if count <= 0:
        return np.zeros((0, n), dtype=complex)
    engine = qmc.Halton(d=2 * n, scramble=False)
    engine.fast_forward(seed + 1)
    uniform = np.clip(engine.random(count), 1e-12, 1 - 1e-12)
    gauss = ndtri(uniform)
    gauss = gauss / np.linalg.norm(gauss, axis=1)[:, None]
    return real_to_complex(gauss)


def sample_points(n, count, max_radius, seed=0):
    """Deterministic centers: z = 0 then directions on a radial ladder."""
    if count <= 0:
        return np.zeros((0, n), dtype=complex)
    points = np.zeros((count, n), dtype=complex)
    if count > 1:
        directions = low_discrepancy_directions(n, count - 1, seed)
        radii = max_radius * np.arange(1, count) / (count - 1)
        points[1:] = directions * radii[:, None]
    return points
