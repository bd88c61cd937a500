"""Exact bigraded polynomials in z and z-bar on C^n.

Terms are stored as a map (alpha, beta) -> ComplexRational, without zero
coefficients. Values are immutable after construction.
"""
import numpy as np

from twistmean.core import ComplexRational, TwistException, \
    E_DIMENSION, E_CONTRACT
from twistmean.helper import as_point_array

INHOMOGENEOUS = "inhomogeneous"


class BigradedPolynomial(object):
    """Polynomial sum c_ab z^a zbar^b with exact complex rational c_ab"""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n, terms=None):
        """Build from a mapping or an iterable of ((alpha, beta), c)."""
        if n < 1:
            raise TwistException("Dimension {} is not positive".format(n),
                                 E_DIMENSION)
        self.n = n
        self._hash = None
        self._terms = {}

        if terms is None:
            return

        items = terms.items() if isinstance(terms, dict) else terms
        for (alpha, beta), coeff in items:
            alpha = tuple(alpha)
            beta = tuple(beta)
            if len(alpha) != n or len(beta) != n:
                raise TwistException("Multi-index length differs from n={}"
                                     .format(n), E_DIMENSION)
            if min(alpha + beta) < 0:
                raise TwistException("Negative exponent in {}|{}"
                                     .format(alpha, beta), E_CONTRACT)
            coeff = ComplexRational.coerce(coeff)
            key = (alpha, beta)
            total = self._terms.get(key)
            coeff = coeff if total is None else total + coeff
            if coeff:
                self._terms[key] = coeff
            elif total is not None:
                del self._terms[key]

    @classmethod
    def _raw(cls, n, terms):
        """Wrap an already clean term dict without re-validation."""
        res = cls(n)
        res._terms = terms
        return res

    def items(self):
        """Terms in canonical order (descending lexicographic on (a, b))."""
        return sorted(self._terms.items(), reverse=True)

    def terms(self):
        """Return a copy of the term map."""
        return dict(self._terms)

    def coefficient(self, alpha, beta):
        """Coefficient of z^alpha zbar^beta (zero if absent)."""
        return self._terms.get((tuple(alpha), tuple(beta)),
                               ComplexRational(0, 0))

    def leading_term(self):
        """First term in canonical order, or None for the zero polynomial."""
        if not self._terms:
            return None
        key = max(self._terms)
        return key, self._terms[key]

    def is_zero(self):
        """True for the zero polynomial."""
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, BigradedPolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "BigradedPolynomial({}, 0)".format(self.n)
        parts = []
        for (alpha, beta), coeff in self.items():
            parts.append("({})*z^{}*zb^{}".format(complex(coeff), alpha,
                                                 beta))
        return "BigradedPolynomial({}, {})".format(self.n, " + ".join(parts))

    def __add__(self, other):
        return poly_arith(self, other, "add")

    def __sub__(self, other):
        return poly_arith(self, other.scale(-1), "add")

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, BigradedPolynomial):
            return poly_arith(self, other, "mul")
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor):
        """Multiply all coefficients by an exact scalar."""
        factor = ComplexRational.coerce(factor)
        if not factor:
            return BigradedPolynomial(self.n)
        return BigradedPolynomial._raw(
            self.n, {key: coeff * factor
                     for key, coeff in self._terms.items()})

    def conjugate(self):
        """Return the polynomial of conj(P(z)); maps H_{p,q} to H_{q,p}."""
        return BigradedPolynomial._raw(
            self.n, {(beta, alpha): coeff.conjugate()
                     for (alpha, beta), coeff in self._terms.items()})

    def degree(self):
        """Highest total degree |a|+|b| (0 for the zero polynomial)."""
        if not self._terms:
            return 0
        return max(sum(alpha) + sum(beta) for alpha, beta in self._terms)


def zero(n):
    """The zero polynomial on C^n."""
    return BigradedPolynomial(n)


def one(n):
    """The constant polynomial 1 on C^n."""
    return monomial(n, (0,) * n, (0,) * n)


def monomial(n, alpha, beta, coeff=1):
    """The monomial c z^alpha zbar^beta."""
    return BigradedPolynomial(n, [((alpha, beta), coeff)])


def variable(n, j, conjugate=False):
    """The coordinate z_j (or zbar_j), j counted from 1."""
    _check_axis(n, j)
    unit = tuple(1 if k == j - 1 else 0 for k in range(n))
    none = (0,) * n
    if conjugate:
        return monomial(n, none, unit)
    return monomial(n, unit, none)


def norm_squared(n):
    """The polynomial |z|^2 = sum z_k zbar_k."""
    terms = []
    for k in range(n):
        unit = tuple(1 if i == k else 0 for i in range(n))
        terms.append(((unit, unit), 1))
    return BigradedPolynomial(n, terms)


def norm_power(P, k):
    """Return |z|^(2k) P."""
    res = P
    square = norm_squared(P.n)
    for dummy in range(k):
        res = res * square
    return res


def _check_axis(n, j):
    if j < 1 or j > n:
        raise TwistException("Axis {} outside 1..{}".format(j, n),
                             E_DIMENSION)


def poly_arith(a, b, op):
    """Exact add, mul or scale; for 'scale' b is a scalar."""
    if op == "scale":
        return a.scale(b)

    if a.n != b.n:
        raise TwistException("Cannot combine polynomials on C^{} and C^{}"
                             .format(a.n, b.n), E_DIMENSION)

    if op == "add":
        res = dict(a._terms)
        for key, coeff in b._terms.items():
            total = res.get(key)
            total = coeff if total is None else total + coeff
            if total:
                res[key] = total
            else:
                res.pop(key, None)
        return BigradedPolynomial._raw(a.n, res)

    if op == "mul":
        res = {}
        for (alpha1, beta1), coeff1 in a._terms.items():
            for (alpha2, beta2), coeff2 in b._terms.items():
                key = (tuple(x + y for x, y in zip(alpha1, alpha2)),
                       tuple(x + y for x, y in zip(beta1, beta2)))
                prod = coeff1 * coeff2
                total = res.get(key)
                res[key] = prod if total is None else total + prod
        return BigradedPolynomial._raw(
            a.n, {key: coeff for key, coeff in res.items() if coeff})

    raise TwistException("Unknown polynomial operation {}".format(op),
                         E_CONTRACT)


def wirtinger(P, j, conjugate=False):
    """Formal derivative d/dz_j (or d/dzbar_j), j counted from 1."""
    _check_axis(P.n, j)
    axis = j - 1
    res = {}
    for (alpha, beta), coeff in P._terms.items():
        exps = beta if conjugate else alpha
        power = exps[axis]
        if power == 0:
            continue
        lowered = exps[:axis] + (power - 1,) + exps[axis + 1:]
        key = (alpha, lowered) if conjugate else (lowered, beta)
        res[key] = coeff * power
    return BigradedPolynomial._raw(P.n, res)


def laplacian(P):
    """Delta P = 4 sum_k d^2 P / dz_k dzbar_k."""
    res = {}
    for (alpha, beta), coeff in P._terms.items():
        for k in range(P.n):
            if alpha[k] == 0 or beta[k] == 0:
                continue
            key = (alpha[:k] + (alpha[k] - 1,) + alpha[k + 1:],
                   beta[:k] + (beta[k] - 1,) + beta[k + 1:])
            value = coeff * (4 * alpha[k] * beta[k])
            total = res.get(key)
            res[key] = value if total is None else total + value
    return BigradedPolynomial._raw(
        P.n, {key: coeff for key, coeff in res.items() if coeff})


def bidegree(P):
    """(p, q) if all terms share |a|=p, |b|=q; zero polynomial is (0, 0)."""
    if not P._terms:
        return (0, 0)
    degrees = {(sum(alpha), sum(beta)) for alpha, beta in P._terms}
    if len(degrees) > 1:
        return INHOMOGENEOUS
    return degrees.pop()


def is_harmonic(P):
    """True if P is homogeneous and annihilated by the Laplacian."""
    return bidegree(P) != INHOMOGENEOUS and laplacian(P).is_zero()


def evaluate(P, z):
    """Evaluate P at one point (returns complex) or at an (N, n) array."""
    points = as_point_array(z, P.n)
    if points is None:
        raise TwistException("Point dimension differs from n={}".format(P.n),
                             E_DIMENSION)

    values = evaluate_many(P, points)
    if np.ndim(z) == 1:
        return complex(values[0])
    return values


def evaluate_many(P, points):
    """Vectorized evaluation at the rows of a complex (N, n) array."""
    conj = np.conj(points)
    powers = {}

    def power(k, e, conjugate):
        key = (k, e, conjugate)
        if key not in powers:
            base = conj[:, k] if conjugate else points[:, k]
            powers[key] = base ** e
        return powers[key]

    res = np.zeros(points.shape[0], dtype=complex)
    for (alpha, beta), coeff in P.items():
        term = np.full(points.shape[0], complex(coeff))
        for k in range(P.n):
            if alpha[k]:
                term = term * power(k, alpha[k], False)
            if beta[k]:
                term = term * power(k, beta[k], True)
        res = res + term
    return res

