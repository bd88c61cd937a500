"""Bigraded harmonic spaces H_{p,q} on C^n.

Kernels of the Laplacian are computed exactly over QQ, orthonormalized on
the unit sphere in exact arithmetic and used to split homogeneous
polynomials into |z|^2k-layers of harmonics.
"""
import logging
from fractions import Fraction

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from twistmean.core import ComplexRational, TwistException, CACHE, ONE, \
    E_CONTRACT, E_SINGULAR, E_DIMENSION
from twistmean.helper import multi_indices, binomial
from twistmean.poly import BigradedPolynomial, monomial, laplacian, \
    bidegree, is_harmonic, norm_power, evaluate_many, INHOMOGENEOUS
from twistmean.quad import monomial_sphere_integral

LOGGER = logging.getLogger(__name__)


def monomial_basis(n, p, q):
    """All monomials z^a zbar^b with |a|=p, |b|=q in canonical order."""
    return [monomial(n, alpha, beta) for alpha, beta in _monomials(n, p, q)]


def _monomials(n, p, q):
    if p < 0 or q < 0:
        return []
    return [(alpha, beta)
            for alpha in multi_indices(n, p)
            for beta in multi_indices(n, q)]


def _charge(alpha, beta):
    return tuple(a - b for a, b in zip(alpha, beta))


def harmonic_dimension(n, p, q):
    """d(p,q) = dim P_{p,q} - dim P_{p-1,q-1}."""
    full = binomial(p + n - 1, p) * binomial(q + n - 1, q)
    if p == 0 or q == 0:
        return full
    return full - binomial(p + n - 2, p - 1) * binomial(q + n - 2, q - 1)


def laplacian_matrix(n, p, q):
    """Matrix of the Laplacian P_{p,q} -> P_{p-1,q-1} in monomial bases."""
    source = _monomials(n, p, q)
    target = _monomials(n, p - 1, q - 1)
    rows = _laplacian_rows(source, target)
    if not rows:
        return DomainMatrix.zeros((0, len(source)), QQ)
    return DomainMatrix([[QQ(int(v)) for v in row] for row in rows],
                        (len(rows), len(source)), QQ)


def _laplacian_rows(source, target):
    position = {key: i for i, key in enumerate(target)}
    rows = [[0] * len(source) for dummy in target]
    for col, (alpha, beta) in enumerate(source):
        image = laplacian(monomial(len(alpha), alpha, beta))
        for key, coeff in image.terms().items():
            rows[position[key]][col] = int(coeff.re)
    return rows


def rational_kernel(rows, ncols):
    """Kernel basis of an integer matrix by exact row reduction over QQ.

    Returns (free column, vector) pairs, one per free column of the
    reduced row echelon form, the free entry set to 1.
    """
    if not rows:
        return [(col, [Fraction(int(i == col)) for i in range(ncols)])
                for col in range(ncols)]

    matrix = DomainMatrix([[QQ(int(v)) for v in row] for row in rows],
                          (len(rows), ncols), QQ)
    reduced, pivots = matrix.rref()
    entries = reduced.to_Matrix().tolist()

    res = []
    for col in range(ncols):
        if col in pivots:
            continue
        vector = [Fraction(0)] * ncols
        vector[col] = Fraction(1)
        for row, pivot in enumerate(pivots):
            entry = entries[row][col]
            if entry != 0:
                vector[pivot] = -Fraction(int(entry.p), int(entry.q))
        res.append((col, vector))
    return res


class HarmonicBasis(object):
    """Basis of H_{p,q}; orthonormal bases keep their squared norms apart.

    For an orthonormal basis the sphere harmonic of index j is
    elements[j] / sqrt(norms[j]), with elements mutually orthogonal.
    """

    def __init__(self, n, p, q, elements, orthonormal=False, norms=None):
        """Initialize from a list of BigradedPolynomial"""
        self.n = n
        self.p = p
        self.q = q
        self.elements = tuple(elements)
        self.orthonormal = orthonormal
        self.norms = tuple(norms) if norms is not None else None

    def __len__(self):
        return len(self.elements)

    def scale(self, j):
        """Float factor turning elements[j] into a unit vector."""
        if not self.orthonormal:
            return 1.0
        return 1.0 / float(np.sqrt(float(self.norms[j])))

    def values(self, points):
        """Return the (N, d) complex array of basis values at points."""
        res = np.zeros((len(points), len(self.elements)), dtype=complex)
        for j, element in enumerate(self.elements):
            res[:, j] = evaluate_many(element, points) * self.scale(j)
        return res


def harmonic_space_basis(n, p, q):
    """Exact basis of H_{p,q}, the kernel of the Laplacian on P_{p,q}."""
    if n < 1:
        raise TwistException("Dimension {} is not positive".format(n),
                             E_DIMENSION)
    return CACHE.get_or_compute(("harmonic", n, p, q),
                                lambda: _harmonic_space_basis(n, p, q))


def _harmonic_space_basis(n, p, q):
    source = _monomials(n, p, q)

    if p == 0 or q == 0:
        elements = monomial_basis(n, p, q)
        return HarmonicBasis(n, p, q, elements)

    # the Laplacian keeps alpha - beta fixed, so it is block diagonal
    blocks = {}
    for col, key in enumerate(source):
        blocks.setdefault(_charge(*key), []).append(col)
    targets = {}
    for key in _monomials(n, p - 1, q - 1):
        targets.setdefault(_charge(*key), []).append(key)

    found = []
    for charge, cols in blocks.items():
        block_source = [source[col] for col in cols]
        rows = _laplacian_rows(block_source, targets.get(charge, []))
        for free, vector in rational_kernel(rows, len(cols)):
            terms = [(block_source[i], value)
                     for i, value in enumerate(vector) if value]
            found.append((cols[free], BigradedPolynomial(n, terms)))

    found.sort(key=lambda entry: entry[0])
    elements = [element for dummy, element in found]

    LOGGER.debug("H_{%d,%d} on C^%d has dimension %d", p, q, n,
                 len(elements))
    return HarmonicBasis(n, p, q, elements)


def sphere_inner_product(P, Q):
    """Exact <P, Q> = integral of P conj(Q) over the unit sphere."""
    if P.n != Q.n:
        raise TwistException("Cannot pair polynomials on C^{} and C^{}"
                             .format(P.n, Q.n), E_DIMENSION)

    index = {}
    for (gamma, delta), coeff in Q.terms().items():
        index.setdefault(_charge(gamma, delta), []).append(
            (delta, coeff.conjugate()))

    total = ComplexRational(0, 0)
    for (alpha, beta), coeff in P.terms().items():
        for delta, conj_coeff in index.get(_charge(alpha, beta), ()):
            exps = tuple(a + d for a, d in zip(alpha, delta))
            total = total + coeff * conj_coeff * \
                monomial_sphere_integral(P.n, exps, exps)
    return total


def orthonormalize_on_sphere(basis):
    """Exact Gram-Schmidt on L^2 of the unit sphere.

    Elements are rescaled to leading coefficient 1; their squared norms
    are kept as exact rationals.
    """
    elements = []
    norms = []
    for source in basis.elements:
        vector = source
        for other, norm in zip(elements, norms):
            coeff = sphere_inner_product(vector, other)
            if coeff:
                vector = vector - other.scale(coeff / norm)

        if vector.is_zero():
            raise TwistException("Basis of H_{{{},{}}} is linearly dependent"
                                 .format(basis.p, basis.q), E_SINGULAR)

        vector = vector.scale(ONE / vector.leading_term()[1])
        elements.append(vector)
        norms.append(sphere_inner_product(vector, vector).re)

    return HarmonicBasis(basis.n, basis.p, basis.q, elements,
                         orthonormal=True, norms=norms)


def orthonormal_basis(n, p, q):
    """Cached orthonormal basis of H_{p,q}."""
    return CACHE.get_or_compute(
        ("orthonormal", n, p, q),
        lambda: orthonormalize_on_sphere(harmonic_space_basis(n, p, q)))


def gram_deviation(basis):
    """Largest squared deviation of the Gram matrix from the identity.

    Exact: 0 means the basis is orthonormal on the unit sphere.
    """
    norms = basis.norms if basis.orthonormal else \
        [Fraction(1)] * len(basis.elements)
    worst = Fraction(0)
    for i, left in enumerate(basis.elements):
        for j, right in enumerate(basis.elements):
            if j < i:
                continue
            value = sphere_inner_product(left, right)
            if i == j:
                deviation = (value.re / norms[i] - 1) ** 2 + \
                    (value.im / norms[i]) ** 2
            else:
                deviation = value.abs2() / (norms[i] * norms[j])
            worst = max(worst, deviation)
    return worst


class HarmonicDecomposition(object):
    """Layers (k, P_k) with P = sum |z|^2k P_k and P_k in H_{p-k,q-k}"""

    def __init__(self, n, source, layers):
        """Initialize from the source bidegree and the layer list"""
        self.n = n
        self.source = source
        self.layers = tuple(layers)

    def __len__(self):
        return len(self.layers)

    def layer(self, k):
        """Return P_k (zero if the layer is absent)."""
        for index, poly in self.layers:
            if index == k:
                return poly
        return BigradedPolynomial(self.n)

    def reconstruct(self):
        """Return sum |z|^2k P_k."""
        res = BigradedPolynomial(self.n)
        for k, poly in self.layers:
            res = res + norm_power(poly, k)
        return res


def _layer_factor(n, p, q, k, top):
    """Delta^k(|z|^2top H) / |z|^2(top-k) H for H in H_{p-top,q-top}."""
    factor = 1
    inner = n + (p - top) + (q - top)
    for m in range(top - k + 1, top + 1):
        factor *= 4 * m * (inner + m - 1)
    return factor


def harmonic_decompose(P):
    """Split a homogeneous P into harmonic layers, top layer first.

    For H in H_{p',q'} the Laplacian gives
    Delta(|z|^2m H) = 4m(n+p'+q'+m-1) |z|^2(m-1) H, so Delta^k P only
    holds the layers k' >= k and the system is solved from the top.
    Results are cached per polynomial.
    """
    degrees = bidegree(P)
    if degrees == INHOMOGENEOUS:
        raise TwistException("Cannot decompose an inhomogeneous polynomial",
                             E_CONTRACT)
    return CACHE.get_or_compute(("decompose", P),
                                lambda: _harmonic_decompose(P, degrees))


def _harmonic_decompose(P, degrees):
    n = P.n
    p, q = degrees
    top = min(p, q)

    powers = [P]
    for dummy in range(top):
        powers.append(laplacian(powers[-1]))

    found = {}
    for k in range(top, -1, -1):
        image = powers[k]
        for upper, layer in found.items():
            image = image - norm_power(layer, upper - k).scale(
                _layer_factor(n, p, q, k, upper))
        if not image.is_zero():
            found[k] = image.scale(Fraction(1, _layer_factor(n, p, q, k, k)))

    remainder = P
    for k, layer in found.items():
        remainder = remainder - norm_power(layer, k)
    if not remainder.is_zero():
        raise TwistException("Layer system left a remainder", E_SINGULAR)

    layers = sorted(found.items()) or [(0, BigradedPolynomial(n))]
    return HarmonicDecomposition(n, (p, q), layers)


def lemma_bound(p, q, l, m):
    """nu(p,q,l,m) = min(p,m) + min(l,q)."""
    return min(p, m) + min(l, q)


def allowed_products(p, q, l, m):
    """Bidegrees H_{p,q} . H_{l,m} may reach: (p+l-j, q+m-j), j <= nu."""
    return {(p + l - j, q + m - j)
            for j in range(lemma_bound(p, q, l, m) + 1)}


def product_components(P, Q):
    """Sorted bidegrees with a nonzero harmonic component in P*Q."""
    if not is_harmonic(P) or not is_harmonic(Q):
        raise TwistException("Product ranges need harmonic homogeneous "
                             "factors", E_CONTRACT)

    decomposition = harmonic_decompose(P * Q)
    res = set()
    for dummy, layer in decomposition.layers:
        if not layer.is_zero():
            res.add(bidegree(layer))
    return sorted(res, reverse=True)
