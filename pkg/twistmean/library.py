"""Built-in test functions on C^n.

Every builder returns a FunctionSampler; functions of the form
profile * harmonic carry their StructuredFunction.
"""
import math
from fractions import Fraction

import numpy as np

from twistmean.core import TwistException, parse_rational, parse_point, \
    E_CONTRACT, E_CONFIG, E_DIMENSION
from twistmean.fields import StructuredFunction, constant_function, \
    zero_function
from twistmean.harmonic import harmonic_space_basis, harmonic_decompose
from twistmean.poly import monomial as poly_monomial
from twistmean.quad import FunctionSampler
from twistmean.radial import RadialProfile


def _basis_element(n, p, q, index):
    elements = harmonic_space_basis(n, p, q).elements
    if not 0 <= index < len(elements):
        raise TwistException("H_{{{},{}}} on C^{} has no element {}".format(
            p, q, n, index), E_CONTRACT)
    return elements[index]


def constant(n, value=1):
    """The constant function (never a member)."""
    return constant_function(n, value).sampler("constant")


def zero(n):
    """The zero function."""
    return zero_function(n).sampler("zero")


def gaussian(n, sign=-1, lam=1):
    """e^(sign lam |z|^2/4)."""
    profile = RadialProfile.term(sign * Fraction(lam), 0)
    function = StructuredFunction(
        n, [(profile, poly_monomial(n, (0,) * n, (0,) * n))])
    return function.sampler("gaussian")


def bump(n, center=None, radius=1.0, lam=1):
    """exp(-1/(1 - |z-c|^2/R^2)) inside |z-c| < R, 0 outside.

    Decay constants bound |z|^k e^(lam|z|^2/4)|f| over the support.
    """
    center = np.zeros(n, dtype=complex) if center is None \
        else np.asarray(center, dtype=complex).reshape(-1)
    if len(center) != n:
        raise TwistException("Bump center dimension differs from n={}"
                             .format(n), E_DIMENSION)
    if radius <= 0:
        raise TwistException("Bump radius must be positive", E_CONTRACT)

    def evaluation(points):
        t = np.sum(np.abs(points - center[None, :]) ** 2, axis=1) / \
            radius ** 2
        res = np.zeros(len(points))
        inside = t < 1
        res[inside] = np.exp(-1 / (1 - t[inside]))
        return res

    outer = float(np.linalg.norm(center)) + radius
    decay = {k: outer ** k * math.exp(float(lam) * outer ** 2 / 4 - 1)
             for k in range(5)}
    return FunctionSampler(n, evaluation, decay, "bump")


def thm33(n, p, q, i, lam=1, index=0):
    """e^(lam rho^2/4) rho^-2(n+p+q-i) P with P in H_{p,q}, 1 <= i <= p."""
    if not 1 <= i <= p:
        raise TwistException("Growing model needs 1 <= i <= p, got i={} p={}"
                             .format(i, p), E_CONTRACT)
    profile = RadialProfile.term(Fraction(lam), -2 * (n + p + q - i))
    function = StructuredFunction(n, [(profile,
                                       _basis_element(n, p, q, index))])
    return function.sampler("thm33")


def thm34(n, p, q, k, lam=1, index=0):
    """e^(-lam rho^2/4) rho^-2(n+p+q-k) P with P in H_{p,q}, 1 <= k <= q."""
    if not 1 <= k <= q:
        raise TwistException("Decaying model needs 1 <= k <= q, got k={} q={}"
                             .format(k, q), E_CONTRACT)
    profile = RadialProfile.term(-Fraction(lam), -2 * (n + p + q - k))
    function = StructuredFunction(n, [(profile,
                                       _basis_element(n, p, q, index))])
    return function.sampler("thm34")


def perturbed(n, p, q, i, amplitude=Fraction(1, 1000), power=-1, lam=1,
              index=0):
    """The growing model plus amplitude * rho^power on the same harmonic."""
    element = _basis_element(n, p, q, index)
    model = thm33(n, p, q, i, lam, index).structure
    extra = StructuredFunction(
        n, [(RadialProfile.term(0, power, amplitude), element)])
    return (model + extra).sampler("perturbed")


def monomial(n, alpha, beta):
    """z^alpha zbar^beta, split into |z|^2k-layers of harmonics."""
    if len(alpha) != n or len(beta) != n:
        raise TwistException("Multi-indices must have length {}".format(n),
                             E_DIMENSION)
    decomposition = harmonic_decompose(poly_monomial(n, alpha, beta))
    function = StructuredFunction(
        n, [(RadialProfile.term(0, 2 * k), layer)
            for k, layer in decomposition.layers])
    return function.sampler("monomial")


def kelvin(n, p, q, i, index=0):
    """|x|^-2(n+p+q-i) P, the Euclidean model; 1 <= i <= p+q."""
    if not 1 <= i <= p + q:
        raise TwistException("Euclidean model needs 1 <= i <= p+q, got i={}"
                             .format(i), E_CONTRACT)
    profile = RadialProfile.term(0, -2 * (n + p + q - i))
    function = StructuredFunction(n, [(profile,
                                       _basis_element(n, p, q, index))])
    return function.sampler("kelvin")


def structured(profile, poly):
    """profile(|z|) * poly(z) for a harmonic homogeneous poly."""
    return StructuredFunction(poly.n, [(profile, poly)]).sampler("structured")


def combination(parts):
    """Sum of weight * sampler over (weight, sampler) pairs."""
    parts = list(parts)
    if not parts:
        raise TwistException("Empty combination", E_CONTRACT)
    n = parts[0][1].n
    if any(sampler.n != n for dummy, sampler in parts):
        raise TwistException("Combined functions live on different C^n",
                             E_DIMENSION)

    name = "+".join(sampler.name for dummy, sampler in parts)
    if all(sampler.structure is not None for dummy, sampler in parts):
        total = StructuredFunction(n)
        for weight, sampler in parts:
            total = total + sampler.structure.scale(weight)
        return total.sampler(name)

    weights = [complex(weight) for weight, dummy in parts]
    samplers = [sampler for dummy, sampler in parts]

    def evaluation(points):
        res = np.zeros(len(points), dtype=complex)
        for weight, sampler in zip(weights, samplers):
            res = res + weight * sampler.evaluation(points)
        return res

    degrees = [sampler.degree for sampler in samplers]
    degree = max(degrees) if None not in degrees else None
    return FunctionSampler(n, evaluation, None, name, None, degree)


def _int(value):
    return int(parse_rational(value))


def _indices(value):
    if isinstance(value, str):
        value = value.replace(" ", "").split(",")
    return tuple(_int(entry) for entry in value)


# parameter name -> (converter, default); n is always supplied by the job
BUILTINS = {
    "constant": (constant, {"value": (parse_rational, 1)}),
    "zero": (zero, {}),
    "gaussian": (gaussian, {"sign": (_int, -1), "lam": (parse_rational, 1)}),
    "bump": (bump, {"center": (parse_point, None),
                    "radius": (lambda v: float(parse_rational(v)), 1.0),
                    "lam": (parse_rational, 1)}),
    "thm33": (thm33, {"p": (_int, 1), "q": (_int, 0), "i": (_int, 1),
                      "lam": (parse_rational, 1), "index": (_int, 0)}),
    "thm34": (thm34, {"p": (_int, 0), "q": (_int, 1), "k": (_int, 1),
                      "lam": (parse_rational, 1), "index": (_int, 0)}),
    "perturbed": (perturbed, {"p": (_int, 1), "q": (_int, 1),
                              "i": (_int, 1),
                              "amplitude": (parse_rational,
                                            Fraction(1, 1000)),
                              "power": (_int, -1),
                              "lam": (parse_rational, 1),
                              "index": (_int, 0)}),
    "monomial": (monomial, {"alpha": (_indices, None),
                            "beta": (_indices, None)}),
    "kelvin": (kelvin, {"p": (_int, 1), "q": (_int, 0), "i": (_int, 1),
                        "index": (_int, 0)}),
}


def build(name, n, params=None, lam=None):
    """Build a library function from its name and raw parameter values.

    lam is the job's twist; it fills the lam parameter when not given.
    """
    if name not in BUILTINS:
        raise TwistException("Unknown function {}; choose one of {}".format(
            name, ", ".join(sorted(BUILTINS))), E_CONFIG)
    builder, schema = BUILTINS[name]
    params = dict(params or {})

    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise TwistException("Unknown parameter(s) {} for {}".format(
            ", ".join(unknown), name), E_CONFIG)

    if lam is not None and "lam" in schema and "lam" not in params:
        params["lam"] = lam

    kwargs = {}
    for key, (converter, default) in schema.items():
        if key in params and params[key] is not None:
            kwargs[key] = converter(params[key])
        elif default is not None:
            kwargs[key] = default
    if name == "monomial" and ("alpha" not in kwargs or
                               "beta" not in kwargs):
        raise TwistException("monomial needs alpha and beta", E_CONFIG)
    return builder(n, **kwargs)
