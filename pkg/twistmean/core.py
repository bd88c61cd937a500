"""twistmean core module

This implements the exception type, the exact complex scalar, the shared
value cache and the small parsers used by all other modules.
"""
import math
import re
import threading
from fractions import Fraction

E_NO_ERROR = 0x00
E_DIMENSION = 0x01
E_CONTRACT = 0x02
E_SAMPLER = 0x03
E_SINGULAR = 0x04
E_EMPTY_ADMISSIBLE = 0x05
E_CONFIG = 0x10
E_FORMAT = 0x11

_INTEGER_OR_RATIO = re.compile(r"^([+-]?[0-9]+)(?:/([0-9]+))?$")
_DECIMAL = re.compile(r"^[+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?$")
_INFINITY = re.compile(r"^[+]?(inf|infinity|∞)$", re.IGNORECASE)


def parse_rational(value):
    """Parse an integer, a decimal or a num/den string to a Fraction.

    JSON numbers are accepted as well; floats are read through their
    shortest decimal representation so 0.1 becomes 1/10.
    """
    if value is None:
        raise TwistException("No number given", E_FORMAT)

    if isinstance(value, bool):
        raise TwistException("Boolean {} is not a number".format(value),
                             E_FORMAT)

    if isinstance(value, (int, Fraction)):
        return Fraction(value)

    if isinstance(value, float):
        if not math.isfinite(value):
            raise TwistException("Number {} is not finite".format(value),
                                 E_FORMAT)
        return Fraction(repr(value))

    text = str(value).strip()

    match = _INTEGER_OR_RATIO.match(text)
    if match:
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) else 1
        if den == 0:
            raise TwistException("Zero denominator in {}".format(text),
                                 E_FORMAT)
        return Fraction(num, den)

    if _DECIMAL.match(text):
        return Fraction(text)

    raise TwistException("{} does not match any number scheme".format(text),
                         E_FORMAT)


def parse_radius(value):
    """Parse an outer radius; 'inf' (or None) means an unbounded annulus."""
    if value is None:
        return math.inf

    if isinstance(value, str) and _INFINITY.match(value.strip()):
        return math.inf

    if isinstance(value, float) and math.isinf(value) and value > 0:
        return math.inf

    return float(parse_rational(value))


def parse_bidegree(value):
    """Parse 'p,q' (or a two element sequence) to a bidegree tuple."""
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).replace(" ", "").split(",")

    if len(parts) != 2:
        raise TwistException("Bidegree {} needs exactly two entries"
                             .format(value), E_FORMAT)

    try:
        p, q = int(parts[0]), int(parts[1])
    except (TypeError, ValueError):
        raise TwistException("Bidegree {} is not integral".format(value),
                             E_FORMAT)

    if p < 0 or q < 0:
        raise TwistException("Bidegree {} is negative".format(value),
                             E_FORMAT)

    return (p, q)


def parse_degree_list(value):
    """Parse '1,0;2,1' (or a list of pairs) to a list of bidegrees."""
    if isinstance(value, (list, tuple)):
        return [parse_bidegree(entry) for entry in value]

    text = str(value).strip()
    if not text:
        return []

    return [parse_bidegree(entry) for entry in text.split(";") if entry]


def parse_point(value):
    """Parse 're,im;re,im' (or a list of [re, im] pairs) to a complex list."""
    if isinstance(value, str):
        value = [entry.split(",") for entry in value.split(";") if entry]

    res = []
    for pair in value:
        if len(pair) != 2:
            raise TwistException("Coordinate {} needs a real and an "
                                 "imaginary part".format(pair), E_FORMAT)
        res.append(complex(float(parse_rational(pair[0])),
                           float(parse_rational(pair[1]))))
    return res


class ComplexRational(object):
    """Exact complex number with rational real and imaginary part."""

    __slots__ = ("re", "im")

    def __init__(self, re_part=0, im_part=0):
        """Initialize from two rationals (anything Fraction accepts)."""
        self.re = re_part if isinstance(re_part, Fraction) \
            else Fraction(re_part)
        self.im = im_part if isinstance(im_part, Fraction) \
            else Fraction(im_part)

    @classmethod
    def coerce(cls, value):
        """Convert ints, Fractions, complex numbers and strings."""
        if isinstance(value, ComplexRational):
            return value

        if isinstance(value, (int, Fraction)):
            return cls(value, 0)

        if isinstance(value, float):
            return cls(parse_rational(value), 0)

        if isinstance(value, complex):
            return cls(parse_rational(value.real), parse_rational(value.imag))

        parts = str(value).split()
        if len(parts) == 1:
            return cls(parse_rational(parts[0]), 0)
        if len(parts) == 2:
            return cls(parse_rational(parts[0]), parse_rational(parts[1]))

        raise TwistException("Cannot read {} as a complex rational"
                             .format(value), E_FORMAT)

    def __add__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ComplexRational(self.re * other, self.im * other)

        other = ComplexRational.coerce(other)
        if not self.im and not other.im:
            return ComplexRational(self.re * other.re, 0)

        return ComplexRational(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return ComplexRational(self.re / other, self.im / other)

        other = ComplexRational.coerce(other)
        norm = other.abs2()
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        return (self * other.conjugate()) / norm

    def __neg__(self):
        return ComplexRational(-self.re, -self.im)

    def __eq__(self, other):
        try:
            other = ComplexRational.coerce(other)
        except TwistException:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return "ComplexRational({}, {})".format(self.re, self.im)

    def conjugate(self):
        """Return the complex conjugate."""
        return ComplexRational(self.re, -self.im)

    def abs2(self):
        """Return |c|^2 as a Fraction."""
        return self.re * self.re + self.im * self.im


ZERO = ComplexRational(0, 0)
ONE = ComplexRational(1, 0)


class ValueCache(object):
    """A simple thread safe caching class based on dictionaries"""

    def __init__(self):
        """Initialize an empty cache"""
        self.values = {}
        self._lock = threading.Lock()

    def get_or_compute(self, name, factory):
        """Return the cached value or compute, store and return it.

        The factory runs outside the lock, so it may use the cache itself.
        """
        with self._lock:
            if name in self.values:
                return self.values[name]

        value = factory()

        with self._lock:
            return self.values.setdefault(name, value)


CACHE = ValueCache()


class TwistException(Exception):
    """Exception when computing or verifying twisted spherical means"""

    errorcode = 0

    def __init__(self, message, errorcode=0):
        """Initialize exception with the given error message and error code"""
        super(TwistException, self).__init__(message)
        self.errorcode = errorcode

    def __str__(self):
        """Return a human-readable representation of the exception"""
        msg = {
            E_NO_ERROR: "no error",
            E_DIMENSION: "dimension mismatch",
            E_CONTRACT: "contract violation",
            E_SAMPLER: "sampler fault",
            E_SINGULAR: "linearly dependent input",
            E_EMPTY_ADMISSIBLE: "no admissible pair",
            E_CONFIG: "configuration error",
            E_FORMAT: "format error",
        }

        return super().__str__() + " (" + msg.get(self.errorcode,
                                                  "unknown error code") + ")"
