"""Conversions between twistmean objects and their text, CSV and JSON forms"""

import csv
import io
import json
import math
import re

import numpy as np

from twistmean.core import ComplexRational, TwistException, parse_rational, \
    E_FORMAT, E_DIMENSION
from twistmean.helper import rational_text
from twistmean.poly import BigradedPolynomial
from twistmean.quad import SphereRule
from twistmean.radial import RadialProfile, SampledProfile

_TERM = re.compile(r"^\(\s*([0-9,\s]*)\|([0-9,\s]*)\)\s+(\S+)(?:\s+(\S+))?$")


def _index_text(index):
    return ",".join(str(entry) for entry in index)


def _coeff_text(coeff):
    return "{} {}".format(rational_text(coeff.re), rational_text(coeff.im))


def format_polynomial(poly):
    """One '(alpha|beta) re im' line per term, canonical order."""
    return "".join("({}|{}) {}\n".format(_index_text(alpha),
                                         _index_text(beta), _coeff_text(coeff))
                   for (alpha, beta), coeff in poly.items())


def _parse_index(text, lineno):
    text = text.replace(" ", "")
    if not text:
        raise TwistException("Empty multi-index in line {}".format(lineno),
                             E_FORMAT)
    return tuple(int(entry) for entry in text.split(","))


def _data_lines(text):
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def parse_polynomial(text, n=None):
    """Parse the polynomial text format; n is needed for an empty text."""
    terms = []
    for lineno, line in _data_lines(text):
        match = _TERM.match(line)
        if not match:
            raise TwistException("Line {} is not '(alpha|beta) re im': {}"
                                 .format(lineno, line), E_FORMAT)
        alpha = _parse_index(match.group(1), lineno)
        beta = _parse_index(match.group(2), lineno)
        if len(alpha) != len(beta) or (n is not None and len(alpha) != n):
            raise TwistException("Line {} has multi-indices of the wrong "
                                 "length".format(lineno), E_DIMENSION)
        n = len(alpha)
        coeff = ComplexRational(parse_rational(match.group(3)),
                                parse_rational(match.group(4) or 0))
        terms.append(((alpha, beta), coeff))

    if n is None:
        raise TwistException("Empty polynomial text without a dimension",
                             E_FORMAT)
    return BigradedPolynomial(n, terms)


def format_profile(profile):
    """One 'sigma m re im' line per term."""
    return "".join("{} {} {}\n".format(rational_text(sigma), m,
                                       _coeff_text(coeff))
                   for (sigma, m), coeff in profile.items())


def parse_profile(text):
    """Parse the profile text format."""
    terms = []
    for lineno, line in _data_lines(text):
        parts = line.split()
        if len(parts) not in (3, 4):
            raise TwistException("Line {} is not 'sigma m re im': {}"
                                 .format(lineno, line), E_FORMAT)
        try:
            m = int(parts[1])
        except ValueError:
            raise TwistException("Line {}: power {} is not an integer"
                                 .format(lineno, parts[1]), E_FORMAT)
        coeff = ComplexRational(parse_rational(parts[2]),
                                parse_rational(parts[3] if len(parts) == 4
                                               else 0))
        terms.append((parse_rational(parts[0]), m, coeff))
    return RadialProfile(terms)


def format_basis(basis):
    """Header 'n p q d', then per element a '# j norm' line and its terms."""
    lines = ["{} {} {} {}\n".format(basis.n, basis.p, basis.q, len(basis))]
    for j, element in enumerate(basis.elements):
        if basis.orthonormal:
            lines.append("# {} {}\n".format(j,
                                            rational_text(basis.norms[j])))
        else:
            lines.append("# {}\n".format(j))
        lines.append(format_polynomial(element))
    return "".join(lines)


def format_layers(decomposition):
    """CSV 'k,alpha,beta,re,im' of the harmonic layers."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(["k", "alpha", "beta", "re", "im"])
    for k, layer in decomposition.layers:
        for (alpha, beta), coeff in layer.items():
            writer.writerow([k, _index_text(alpha), _index_text(beta),
                             rational_text(coeff.re),
                             rational_text(coeff.im)])
    return output.getvalue()


def format_rule(rule):
    """CSV dump, header 'n,s,order', rows 'x1,y1,...,xn,yn,weight'."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow([rule.n, repr(rule.radius), rule.order])
    for point, weight in zip(rule.real_nodes(), rule.weights):
        writer.writerow([repr(float(x)) for x in point] +
                        [repr(float(weight))])
    return output.getvalue()


def parse_rule(text):
    """Load a rule dump; floats are read back bit for bit."""
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows or len(rows[0]) != 3:
        raise TwistException("Rule dump needs a 'n,s,order' header",
                             E_FORMAT)
    try:
        n, radius, order = int(rows[0][0]), float(rows[0][1]), \
            int(rows[0][2])
        data = np.array([[float(x) for x in row] for row in rows[1:]])
    except ValueError as exc:
        raise TwistException("Rule dump is not numeric: {}".format(exc),
                             E_FORMAT)
    if data.ndim != 2 or data.shape[1] != 2 * n + 1:
        raise TwistException("Rule rows need {} columns".format(2 * n + 1),
                             E_FORMAT)
    nodes = data[:, 0:2 * n:2] + 1j * data[:, 1:2 * n:2]
    return SphereRule(n, radius, order, nodes, data[:, 2 * n].copy())


def format_sampled(samples, fitted=None):
    """CSV 'rho,re,im' (plus 'fit_re,fit_im' when fitted values are given)."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    header = ["rho", "re", "im"]
    if fitted is not None:
        header += ["fit_re", "fit_im"]
    writer.writerow(header)
    for row, (rho, value) in enumerate(zip(samples.grid, samples.values)):
        entry = [repr(float(rho)), repr(float(value.real)),
                 repr(float(value.imag))]
        if fitted is not None:
            entry += [repr(float(fitted[row].real)),
                      repr(float(fitted[row].imag))]
        writer.writerow(entry)
    return output.getvalue()


def parse_sampled(text, lower=None, upper=None):
    """Read a 'rho,re,im' CSV into a SampledProfile."""
    reader = csv.reader(io.StringIO(text))
    grid = []
    values = []
    for lineno, row in enumerate(reader, 1):
        if not row or row[0].strip().startswith("#"):
            continue
        if lineno == 1 and row[0].strip() == "rho":
            continue
        if len(row) < 2:
            raise TwistException("Line {} needs rho,re[,im]".format(lineno),
                                 E_FORMAT)
        try:
            rho = float(row[0])
            value = complex(float(row[1]),
                            float(row[2]) if len(row) > 2 else 0.0)
        except ValueError:
            raise TwistException("Line {} is not numeric: {}".format(
                lineno, ",".join(row)), E_FORMAT)
        grid.append(rho)
        values.append(value)
    return SampledProfile(grid, values, lower, upper)


def format_means(records):
    """CSV of tested pairs: center coordinates, s, side, mean and scale."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    n = len(records[0].z) if records else 0
    header = []
    for k in range(1, n + 1):
        header += ["z{}_re".format(k), "z{}_im".format(k)]
    writer.writerow(header + ["s", "side", "mean_re", "mean_im", "scale"])
    for record in records:
        row = []
        for c in record.z:
            row += [repr(float(c.real)), repr(float(c.imag))]
        writer.writerow(row + [repr(record.s), record.side,
                               repr(record.mean.real),
                               repr(record.mean.imag), repr(record.scale)])
    return output.getvalue()


def _json_ready(value):
    if isinstance(value, dict):
        return {str(key): _json_ready(entry) for key, entry in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(entry) for entry in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def report_to_json(report):
    """Deterministic JSON text; non-finite floats become strings."""
    return json.dumps(_json_ready(report), sort_keys=True, indent=2) + "\n"


def format_coefficients(records):
    """CSV 'j,rho,re,im,fit_re,fit_im' for the fits of one (p, q)."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(["j", "rho", "re", "im", "fit_re", "fit_im"])
    for record in records:
        grid = record.samples.grid
        fitted = np.zeros(len(grid), dtype=complex)
        for coeff, profile in zip(record.fit.coefficients, record.fit.basis):
            fitted = fitted + coeff * profile.evaluate(grid)
        for rho, value, fit in zip(grid, record.samples.values, fitted):
            writer.writerow([record.j, repr(float(rho)),
                             repr(float(value.real)), repr(float(value.imag)),
                             repr(float(fit.real)), repr(float(fit.imag))])
    return output.getvalue()
