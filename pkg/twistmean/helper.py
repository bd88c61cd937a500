"""Helper functions that are not specifically tied to twisted means"""

import math
from fractions import Fraction

import numpy as np


def multi_indices(n, degree):
    """Return all multi-indices of length n and given degree.

    The order is descending lexicographic, so (1,0) comes before (0,1).
    """
    if n == 1:
        return [(degree,)]

    res = []
    for first in range(degree, -1, -1):
        for rest in multi_indices(n - 1, degree - first):
            res.append((first,) + rest)
    return res


def multi_factorial(index):
    """Return alpha! = prod(alpha_k!)."""
    res = 1
    for entry in index:
        res *= math.factorial(entry)
    return res


def binomial(top, bottom):
    """Binomial coefficient that is 0 for negative arguments."""
    if top < 0 or bottom < 0 or bottom > top:
        return 0
    return math.comb(top, bottom)


def rational_text(value):
    """Format a Fraction as 'num/den' or 'num'."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "{}/{}".format(value.numerator, value.denominator)


def fixed_order_sum(values):
    """Sum a complex array by numpy's pairwise reduction, part by part.

    The reduction order only depends on the array length, so equal inputs
    give bit-identical sums whatever thread computed them.
    """
    values = np.ascontiguousarray(values)
    if np.iscomplexobj(values):
        return complex(float(np.sum(values.real)), float(np.sum(values.imag)))
    return complex(float(np.sum(values)), 0.0)


def chebyshev_grid(lower, upper, count):
    """Chebyshev points of the first kind in (lower, upper), increasing."""
    if count < 1:
        return np.zeros(0)
    k = np.arange(count)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * count))[::-1]
    return lower + (upper - lower) * (nodes + 1) / 2


def complex_to_real(points):
    """Map points of C^n (last axis) to R^2n as (x1, y1, ..., xn, yn)."""
    points = np.asarray(points, dtype=complex)
    res = np.empty(points.shape[:-1] + (2 * points.shape[-1],))
    res[..., 0::2] = points.real
    res[..., 1::2] = points.imag
    return res


def real_to_complex(points):
    """Inverse of complex_to_real."""
    points = np.asarray(points, dtype=float)
    return points[..., 0::2] + 1j * points[..., 1::2]


def as_point_array(points, n):
    """Return points as a complex (N, n) array; a single point gives N=1."""
    arr = np.asarray(points, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.shape[-1] != n:
        return None
    return arr
