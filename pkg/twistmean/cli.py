"""Command line front end: 'twistmean <command> [options]'.

Every command writes report.json (plus CSV tables) into the output
directory. Exit status: 0 member/consistent/clean, 2 non-member/
inconsistent/no-support, 3 inconclusive/hypothesis-violated, 1 error.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from twistmean import library
from twistmean.conversion import format_basis, format_layers, format_means, \
    format_coefficients, format_profile, format_rule, format_sampled, \
    parse_polynomial, parse_profile, parse_rule, parse_sampled, report_to_json
from twistmean.core import TwistException, parse_rational, parse_radius, \
    parse_degree_list, parse_point, E_CONFIG
from twistmean.harmonic import orthonormal_basis, harmonic_decompose, \
    harmonic_dimension
from twistmean.poly import bidegree
from twistmean.quad import build_sphere_rule, default_order, \
    spherical_mean, SIDES, RIGHT
from twistmean.radial import RadialProfile, characterization_basis, \
    fit_profile
from twistmean.selftest import run_selftest
from twistmean.zspace import AnnulusSpec, MeanRecord, MembershipReport, \
    FitRecord, membership_test, characterize, two_sided_characterize, \
    euclidean_characterize, support_radius, helgason_support_check, \
    default_grid, fit_verdict, \
    MEMBER, CONSISTENT, CLEAN, NON_MEMBER, INCONSISTENT, NO_SUPPORT, \
    INCONCLUSIVE, HYPOTHESIS_VIOLATED

LOGGER = logging.getLogger(__name__)

THREADS_VARIABLE = "TWISTMEAN_THREADS"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_UNDECIDED = 3

EXIT_CODES = {
    MEMBER: EXIT_OK, CONSISTENT: EXIT_OK, CLEAN: EXIT_OK,
    NON_MEMBER: EXIT_NEGATIVE, INCONSISTENT: EXIT_NEGATIVE,
    NO_SUPPORT: EXIT_NEGATIVE,
    INCONCLUSIVE: EXIT_UNDECIDED, HYPOTHESIS_VIOLATED: EXIT_UNDECIDED,
}

COMMANDS = ("basis", "decompose", "mean", "verify", "characterize",
            "support", "selftest")

# shortcuts for library parameters
MODEL_FLAGS = ("p", "q", "i", "k")


def _positive_int(value):
    res = parse_rational(value)
    if res.denominator != 1 or res < 1:
        raise TwistException("{} is not a positive integer".format(value),
                             E_CONFIG)
    return int(res)


def _non_negative_int(value):
    res = parse_rational(value)
    if res.denominator != 1 or res < 0:
        raise TwistException("{} is not a non-negative integer"
                             .format(value), E_CONFIG)
    return int(res)


def _float(value):
    return float(parse_rational(value))


def _flag(value):
    if isinstance(value, bool):
        return value
    if str(value).lower() in ("1", "true", "yes"):
        return True
    if str(value).lower() in ("0", "false", "no"):
        return False
    raise TwistException("{} is not a boolean".format(value), E_CONFIG)


def _text(value):
    return str(value)


def _command(value):
    if value not in COMMANDS:
        raise TwistException("Unknown command {}".format(value), E_CONFIG)
    return value


def _side(value):
    if value not in SIDES:
        raise TwistException("Side must be one of {}".format(
            ", ".join(SIDES)), E_CONFIG)
    return value


def _params(value):
    if not isinstance(value, dict):
        raise TwistException("params must be an object", E_CONFIG)
    return dict(value)


def _center(value):
    return np.array(parse_point(value), dtype=complex)


def _threads_default():
    value = os.environ.get(THREADS_VARIABLE)
    if not value:
        return 1
    try:
        return _positive_int(value)
    except TwistException:
        raise TwistException("{}={} is not a positive integer".format(
            THREADS_VARIABLE, value), E_CONFIG)


class JobConfig(object):
    """A fully validated job, built from flags and an optional JSON file"""

    # key -> (parser, default)
    FIELDS = {
        "command": (_command, None),
        "n": (_positive_int, 2),
        "r": (_float, 1.0),
        "R": (parse_radius, "inf"),
        "lambda": (parse_rational, 1),
        "degrees": (parse_degree_list, "0,0;1,0;0,1;1,1"),
        "order": (_positive_int, None),
        "grid_count": (_positive_int, 40),
        "tolerance": (_float, 1e-8),
        "function": (_text, "constant"),
        "params": (_params, None),
        "profile_file": (_text, None),
        "poly_file": (_text, None),
        "samples_file": (_text, None),
        "rule_file": (_text, None),
        "dump_rule": (_flag, False),
        "output": (_text, "."),
        "seed": (_non_negative_int, 0),
        "z_samples": (_positive_int, 20),
        "s_per_z": (_positive_int, 5),
        "side": (_side, RIGHT),
        "two_sided": (_flag, False),
        "euclidean": (_flag, False),
        "r_max": (_float, 3.0),
        "step": (_float, 0.05),
        "z": (_center, None),
        "s": (_float, 2.0),
        "threads": (_positive_int, None),
    }

    def __init__(self, values):
        """Validate a dict of raw values; unknown keys are rejected"""
        unknown = sorted(set(values) - set(self.FIELDS))
        if unknown:
            raise TwistException("Unknown configuration key(s): {}".format(
                ", ".join(unknown)), E_CONFIG)

        self.values = {}
        for key, (parser, default) in self.FIELDS.items():
            raw = values.get(key)
            if raw is None:
                raw = default
            if raw is None:
                self.values[key] = None
                continue
            try:
                self.values[key] = parser(raw)
            except (TwistException, ValueError, TypeError, IndexError) as exc:
                raise TwistException("Field '{}': {}".format(key, exc),
                                     E_CONFIG)

        if self.values["command"] is None:
            raise TwistException("No command given", E_CONFIG)
        if self.values["params"] is None:
            self.values["params"] = {}
        if self.values["threads"] is None:
            self.values["threads"] = _threads_default()
        if self.values["z"] is None:
            self.values["z"] = np.zeros(self.values["n"], dtype=complex)

    def __getattr__(self, name):
        values = self.__dict__.get("values", {})
        key = {"lam": "lambda"}.get(name, name)
        if key in values:
            return values[key]
        raise AttributeError(name)

    @classmethod
    def from_text(cls, text, base=None):
        """Parse a JSON document on top of base values."""
        try:
            document = json.loads(text)
        except ValueError as exc:
            raise TwistException("Config line {} column {}: {}".format(
                getattr(exc, "lineno", "?"), getattr(exc, "colno", "?"),
                getattr(exc, "msg", exc)), E_CONFIG)
        if not isinstance(document, dict):
            raise TwistException("Config must be a JSON object", E_CONFIG)
        values = dict(base or {})
        values.update(document)
        return cls(values)

    @classmethod
    def from_arguments(cls, args):
        """Flags first, then the --config document on top."""
        values = {}
        for key in cls.FIELDS:
            attribute = {"lambda": "lam"}.get(key, key)
            value = getattr(args, attribute, None)
            if value is not None and value is not False:
                values[key] = value
        params = {}
        for key in MODEL_FLAGS:
            if getattr(args, key, None) is not None:
                params[key] = getattr(args, key)
        for entry in getattr(args, "param", None) or ():
            if "=" not in entry:
                raise TwistException("--param {} is not KEY=VALUE".format(
                    entry), E_CONFIG)
            key, value = entry.split("=", 1)
            params[key] = value
        if params:
            values["params"] = params
        if args.config:
            with open(args.config) as config:
                return cls.from_text(config.read(), values)
        return cls(values)

    def annulus(self):
        """The AnnulusSpec of the job."""
        return AnnulusSpec(self.n, self.r, self.values["R"])

    def unit_rule(self):
        """Unit sphere rule: the rule_file dump or the product rule."""
        if self.rule_file:
            rule = parse_rule(_read(self.rule_file))
            if rule.n != self.n:
                raise TwistException("Rule file lives on C^{}, the job on "
                                     "C^{}".format(rule.n, self.n), E_CONFIG)
            return rule if rule.radius == 1.0 else rule.scaled(1.0)
        return build_sphere_rule(self.n, 1.0, self.order or
                                 default_order(self.n))

    def grid(self):
        """Radius grid for coefficient extraction."""
        return default_grid(self.annulus(), self.grid_count)

    def function(self):
        """The FunctionSampler named by the job."""
        name = self.values["function"]
        if name == "structured":
            if not self.profile_file or not self.poly_file:
                raise TwistException("structured needs profile_file and "
                                     "poly_file", E_CONFIG)
            profile = parse_profile(_read(self.profile_file))
            poly = parse_polynomial(_read(self.poly_file), self.n)
            return library.structured(profile, poly)
        return library.build(name, self.n, self.params, self.lam)


def _read(path):
    with open(path) as source:
        return source.read()


def _write(job, name, text):
    os.makedirs(job.output, exist_ok=True)
    path = os.path.join(job.output, name)
    with open(path, "w", newline="") as target:
        target.write(text)
    LOGGER.debug("wrote %s", path)


def _write_report(job, report):
    _write(job, "report.json", report_to_json(report))


def run_basis(job):
    """Export orthonormal bases of the requested H_{p,q}."""
    entries = []
    for p, q in job.degrees:
        basis = orthonormal_basis(job.n, p, q)
        _write(job, "basis_{}_{}.txt".format(p, q), format_basis(basis))
        if p + q > 0:
            profile = RadialProfile()
            for term in characterization_basis(job.n, p, q, job.lam,
                                               job.two_sided):
                profile = profile + term
            _write(job, "profiles_{}_{}.txt".format(p, q),
                   format_profile(profile))
        entries.append({"p": p, "q": q, "d": len(basis),
                        "closed_form": harmonic_dimension(job.n, p, q)})
    _write_report(job, {"command": "basis", "n": job.n, "bases": entries})
    return EXIT_OK


def run_decompose(job):
    """Split a polynomial file into harmonic layers."""
    if not job.poly_file:
        raise TwistException("decompose needs poly_file", E_CONFIG)
    poly = parse_polynomial(_read(job.poly_file), job.n)
    decomposition = harmonic_decompose(poly)
    _write(job, "layers.csv", format_layers(decomposition))
    _write_report(job, {
        "command": "decompose", "n": poly.n,
        "source": list(decomposition.source),
        "layers": [{"k": k, "bidegree": list(bidegree(layer)),
                    "terms": len(layer)}
                   for k, layer in decomposition.layers]})
    return EXIT_OK


def run_mean(job):
    """One twisted, left or Euclidean mean."""
    f = job.function()
    rule = job.unit_rule().scaled(job.s)
    mean, scale = spherical_mean(f, job.z, job.s, job.lam, rule, job.side)
    record = MeanRecord(job.z, job.s, mean, scale, job.side)
    _write(job, "means.csv", format_means([record]))
    if job.dump_rule:
        _write(job, "rule.csv", format_rule(rule))
    _write_report(job, {"command": "mean", "function": f.name,
                        "lambda": float(job.lam), "mean": record.to_dict()})
    return EXIT_OK


def run_verify(job):
    """Vanishing means on sampled admissible pairs."""
    f = job.function()
    report = membership_test(f, job.annulus(), job.z_samples, job.s_per_z,
                             job.lam, job.tolerance, job.side,
                             job.unit_rule(), job.threads, job.seed)
    _write(job, "means.csv", format_means(report.pairs))
    _write_report(job, report.to_dict())
    return EXIT_CODES[report.verdict]


def _fit_samples(job):
    p, q = job.degrees[0]
    ann = job.annulus()
    samples = parse_sampled(_read(job.samples_file), ann.r, ann.R)
    basis = characterization_basis(job.n, p, q, job.lam, job.two_sided)
    report = MembershipReport(ann, job.lam, tolerance=job.tolerance)
    fit = fit_profile(samples, basis)
    report.fits.append(FitRecord(p, q, 0, fit, samples))
    fitted = np.zeros(len(samples), dtype=complex)
    for coeff, profile in zip(fit.coefficients, fit.basis):
        fitted = fitted + coeff * profile.evaluate(samples.grid)
    _write(job, "fit.csv", format_sampled(samples, fitted))
    report.verdict = fit_verdict(report, job.tolerance)
    return report


def run_characterize(job):
    """Coefficient fits against the admissible profiles."""
    ann = job.annulus()
    if job.samples_file:
        report = _fit_samples(job)
    elif job.euclidean:
        degrees = sorted({p + q for p, q in job.degrees})
        report = euclidean_characterize(job.function(), ann, degrees,
                                        job.grid(), job.unit_rule(),
                                        job.tolerance)
    elif job.two_sided:
        report = two_sided_characterize(job.function(), ann, job.degrees,
                                        job.grid(), job.unit_rule(),
                                        job.lam, job.tolerance,
                                        job.z_samples, job.s_per_z,
                                        job.threads, job.seed)
    else:
        report = characterize(job.function(), ann, job.degrees, job.grid(),
                              job.unit_rule(), job.lam, job.tolerance,
                              side=job.side)

    channels = {}
    for record in report.fits:
        channels.setdefault((record.p, record.q), []).append(record)
    for (p, q), records in sorted(channels.items()):
        _write(job, "coeffs_{}_{}.csv".format(p, q),
               format_coefficients(records))
    if report.pairs:
        _write(job, "means.csv", format_means(report.pairs))
    _write_report(job, report.to_dict())
    return EXIT_CODES[report.verdict]


def run_support(job):
    """Support radius scan (twisted, two-sided or Euclidean)."""
    f = job.function()
    if job.euclidean:
        report = helgason_support_check(f, job.r_max, job.step,
                                        job.tolerance, rule=job.unit_rule(),
                                        threads=job.threads, seed=job.seed)
    else:
        report = support_radius(f, job.r_max, job.step, job.tolerance,
                                job.lam, two_sided=job.two_sided,
                                rule=job.unit_rule(), threads=job.threads,
                                seed=job.seed)
    _write_report(job, report.to_dict())
    return EXIT_CODES[report.verdict]


def run_selftest_command(job):
    """The invariant suite; nonzero exit on any failed check."""
    report = run_selftest(job.threads)
    _write_report(job, report)
    return EXIT_OK if report["passed"] else EXIT_NEGATIVE


RUNNERS = {
    "basis": run_basis,
    "decompose": run_decompose,
    "mean": run_mean,
    "verify": run_verify,
    "characterize": run_characterize,
    "support": run_support,
    "selftest": run_selftest_command,
}


def run(job):
    """Run a validated job and return its exit status."""
    return RUNNERS[job.command](job)


def _job_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file; overrides flags")
    common.add_argument("--output", help="output directory (default .)")
    common.add_argument("--n", help="complex dimension")
    common.add_argument("--r", help="inner radius of the annulus")
    common.add_argument("--R", help="outer radius or 'inf'")
    common.add_argument("--lambda", dest="lam", help="twist parameter")
    common.add_argument("--degrees", help="bidegrees 'p,q;p,q'")
    common.add_argument("--order", help="sphere rule order")
    common.add_argument("--grid-count", dest="grid_count",
                        help="radii for coefficient extraction")
    common.add_argument("--tolerance", help="member tolerance")
    common.add_argument("--function", help="library function name")
    common.add_argument("--param", action="append",
                        help="function parameter KEY=VALUE")
    for key in MODEL_FLAGS:
        common.add_argument("--" + key, help="function parameter " + key)
    common.add_argument("--profile-file", dest="profile_file")
    common.add_argument("--poly-file", dest="poly_file")
    common.add_argument("--samples-file", dest="samples_file")
    common.add_argument("--rule-file", dest="rule_file",
                        help="sphere rule dump to use instead of the "
                        "product rule")
    common.add_argument("--dump-rule", dest="dump_rule", action="store_true",
                        help="write the sphere rule of a mean to rule.csv")
    common.add_argument("--seed")
    common.add_argument("--z-samples", dest="z_samples")
    common.add_argument("--s-per-z", dest="s_per_z")
    common.add_argument("--side", help="right, left or euclidean")
    common.add_argument("--two-sided", dest="two_sided",
                        action="store_true")
    common.add_argument("--euclidean", action="store_true")
    common.add_argument("--r-max", dest="r_max")
    common.add_argument("--step")
    common.add_argument("--z", help="center 're,im;re,im'")
    common.add_argument("--s", help="sphere radius")
    common.add_argument("--threads",
                        help="worker threads (default ${})".format(
                            THREADS_VARIABLE))
    common.add_argument("--verbose", action="store_true")
    return common


def build_parser():
    """The argument parser with one sub-command per job type."""
    common = _job_flags()
    parser = argparse.ArgumentParser(
        prog="twistmean",
        description="Twisted spherical means on annuli of C^n")
    commands = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        commands.add_parser(name, parents=[common],
                            help=RUNNERS[name].__doc__.splitlines()[0])
    return parser


def main(argv=None):
    """Entry point of the twistmean script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_ERROR

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        job = JobConfig.from_arguments(args)
        status = run(job)
    except TwistException as exc:
        LOGGER.error("%s", exc)
        return EXIT_ERROR
    except OSError as exc:
        LOGGER.error("cannot access %s: %s", exc.filename, exc.strerror)
        return EXIT_ERROR

    LOGGER.info("%s finished with exit status %d", job.command, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
