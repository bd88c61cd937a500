"""Membership and characterization engine for Z(Ann(r,R)).

Twisted means are tested on admissible (z, s) pairs, spherical harmonic
coefficients are extracted by quadrature and fitted against the closed
form profiles, and support radii are estimated from vanishing means.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from twistmean.core import TwistException, \
    E_CONTRACT, E_EMPTY_ADMISSIBLE, E_DIMENSION
from twistmean.harmonic import orthonormal_basis
from twistmean.helper import chebyshev_grid, fixed_order_sum
from twistmean.quad import build_sphere_rule, default_order, \
    spherical_mean, sample_points, low_discrepancy_directions, \
    RIGHT, LEFT, EUCLIDEAN, SIDES
from twistmean.radial import SampledProfile, characterization_basis, \
    euclidean_basis, fit_profile, profile_label

LOGGER = logging.getLogger(__name__)

MEMBER_TOL = 1e-8
NONMEMBER_TOL = 1e-4
NOISE_FLOOR = 1e-6
GEOMETRY_MARGIN = 1e-9

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"
INCONCLUSIVE = "inconclusive"
MEMBER = "member"
NON_MEMBER = "non-member"
CLEAN = "clean"
NO_SUPPORT = "no-support"
HYPOTHESIS_VIOLATED = "hypothesis-violated"

FLAG_DECAY_VIOLATED = "decay hypothesis violated"
FLAG_DECAY_MISSING = "decay constants missing"
FLAG_DECAY_EXCEEDED = "decay constants exceeded"
FLAG_SUPPORT_CONTRADICTED = "support contradicted"
FLAG_ILL_CONDITIONED = "ill-conditioned fit"


class AnnulusSpec(object):
    """The open shell r < |z| < R in C^n; R may be infinite"""

    def __init__(self, n, r, R=math.inf):
        """Initialize and check r < R"""
        if n < 1:
            raise TwistException("Dimension {} is not positive".format(n),
                                 E_DIMENSION)
        if r < 0 or not r < R:
            raise TwistException("Annulus needs 0 <= r < R, got r={} R={}"
                                 .format(r, R), E_CONTRACT)
        self.n = n
        self.r = float(r)
        self.R = float(R)

    def bounded(self):
        """True for a finite outer radius."""
        return math.isfinite(self.R)

    def contains(self, rho):
        """Elementwise r < rho < R."""
        rho = np.asarray(rho, dtype=float)
        return (rho > self.r) & (rho < self.R)

    def to_dict(self):
        """JSON friendly form."""
        return {"n": self.n, "r": self.r,
                "R": self.R if self.bounded() else "inf"}


def admissible(z, s, ann, margin=GEOMETRY_MARGIN):
    """True iff s > r + |z| and s + |z| < R, both by a margin."""
    radius = float(np.linalg.norm(np.asarray(z, dtype=complex)))
    if not s > ann.r + radius + margin:
        return False
    if ann.bounded() and not s + radius < ann.R - margin:
        return False
    return True


def default_grid(ann, count=40):
    """Chebyshev radii inside the annulus, away from its edges."""
    if ann.bounded():
        delta = 0.05 * (ann.R - ann.r)
        return chebyshev_grid(ann.r + delta, ann.R - delta, count)
    delta = 0.2
    return chebyshev_grid(ann.r + delta, ann.r + delta + 4, count)


def default_center_radius(ann):
    """Largest |z| used for sampled centers."""
    if ann.bounded():
        return min(2.0, 0.45 * (ann.R - ann.r))
    return 2.0


def sample_pairs(ann, z_points, s_count, offsets=None):
    """Admissible (z, s) pairs, s_count radii per center.

    Unbounded: s = r + |z| + offset. Bounded: s spread inside
    (r + |z|, R - |z|). Centers without room are skipped.
    """
    pairs = []
    for z in np.asarray(z_points, dtype=complex):
        radius = float(np.linalg.norm(z))
        lower = ann.r + radius
        if ann.bounded():
            upper = ann.R - radius
            if upper - lower <= 4 * GEOMETRY_MARGIN:
                continue
            radii = lower + (upper - lower) * \
                np.arange(1, s_count + 1) / (s_count + 1)
        else:
            if offsets is None:
                offsets = np.linspace(0.75, 2.75, s_count)
            radii = lower + np.asarray(offsets, dtype=float)
        for s in radii:
            if admissible(z, float(s), ann):
                pairs.append((z, float(s)))
    return pairs


class MeanRecord(object):
    """One tested sphere: center, radius, mean value and sup |f|"""

    def __init__(self, z, s, mean, scale, side=RIGHT):
        """Initialize from the quadrature results"""
        self.z = np.asarray(z, dtype=complex)
        self.s = float(s)
        self.mean = complex(mean)
        self.scale = float(scale)
        self.side = side

    def to_dict(self):
        """JSON friendly form."""
        return {"z": [[float(c.real), float(c.imag)] for c in self.z],
                "s": self.s, "side": self.side,
                "mean_re": self.mean.real, "mean_im": self.mean.imag,
                "scale": self.scale}


class HarmonicCoefficient(object):
    """a_j^{p,q}(rho) and a~ = rho^-(p+q) a on a grid"""

    def __init__(self, p, q, j, raw, normalized):
        """Initialize from the two sampled profiles"""
        self.p = p
        self.q = q
        self.j = j
        self.raw = raw
        self.normalized = normalized


class FitRecord(object):
    """Fit of one coefficient profile against its admissible basis"""

    def __init__(self, p, q, j, fit, samples):
        """Initialize from a ProfileFit and the fitted samples"""
        self.p = p
        self.q = q
        self.j = j
        self.fit = fit
        self.samples = samples

    @property
    def residual(self):
        """Relative fit residual."""
        return self.fit.residual

    def to_dict(self):
        """JSON friendly form."""
        conditioning = self.fit.conditioning
        return {"p": self.p, "q": self.q, "j": self.j,
                "coeffs": [[c.real, c.imag] for c in self.fit.coefficients],
                "basis": [profile_label(b) for b in self.fit.basis],
                "residual": self.fit.residual,
                "conditioning": conditioning if math.isfinite(conditioning)
                                else "inf"}


class MembershipReport(object):
    """Tested pairs, coefficient fits and the verdict derived from them"""

    def __init__(self, annulus, lam, pairs=None, fits=None, verdict=None,
                 flags=None, tolerance=MEMBER_TOL):
        """Initialize a report; verdicts are filled in by the tests"""
        self.annulus = annulus
        self.lam = lam
        self.pairs = list(pairs or [])
        self.fits = list(fits or [])
        self.verdict = verdict
        self.flags = list(flags or [])
        self.tolerance = tolerance

    @property
    def max_mean(self):
        """Largest |mean| over the tested pairs."""
        return max([abs(record.mean) for record in self.pairs] or [0.0])

    @property
    def scale(self):
        """Largest sampled |f| over the tested spheres."""
        return max([record.scale for record in self.pairs] or [0.0])

    @property
    def max_residual(self):
        """Largest fit residual."""
        return max([record.residual for record in self.fits] or [0.0])

    def fit_for(self, p, q, j=0):
        """The fit record of channel (p, q, j), or None."""
        for record in self.fits:
            if (record.p, record.q, record.j) == (p, q, j):
                return record
        return None

    def to_dict(self):
        """JSON friendly form."""
        return {"annulus": self.annulus.to_dict(),
                "lambda": float(self.lam),
                "pairs": [record.to_dict() for record in self.pairs],
                "fits": [record.to_dict() for record in self.fits],
                "max_mean": self.max_mean,
                "scale": self.scale,
                "max_residual": self.max_residual,
                "tolerance": self.tolerance,
                "verdict": self.verdict,
                "flags": list(self.flags)}


class SupportReport(object):
    """Scanned radii, the estimated support radius and hypothesis flags"""

    def __init__(self, radius, verdict, scans, flags, probe_max):
        """Initialize from the scan results"""
        self.radius = radius
        self.verdict = verdict
        self.scans = scans
        self.flags = list(flags)
        self.probe_max = probe_max

    def violations(self):
        """Scanned radii below the estimate where some mean did not vanish."""
        return [scan for scan in self.scans if not scan["passed"]]

    def to_dict(self):
        """JSON friendly form."""
        return {"radius": self.radius, "verdict": self.verdict,
                "scans": self.scans, "flags": list(self.flags),
                "probe_max": self.probe_max}


def _unit_rule(n, rule):
    if rule is None:
        return build_sphere_rule(n, 1.0, default_order(n))
    if rule.radius != 1.0:
        return rule.scaled(1.0)
    return rule


def _run_ordered(task, items, threads):
    """Map task over items; results keep the item order."""
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(task, items))
    return [task(item) for item in items]


def evaluate_means(f, pairs, lam, unit, side=RIGHT, threads=1):
    """MeanRecord per (z, s), computed in parallel, reported in order."""
    if side not in SIDES:
        raise TwistException("Unknown mean side {}".format(side), E_CONTRACT)

    def task(pair):
        z, s = pair
        mean, sup = spherical_mean(f, z, s, lam, unit.scaled(s), side)
        return MeanRecord(z, s, mean, sup, side)

    return _run_ordered(task, pairs, threads)


def _mean_verdict(max_mean, scale, tol):
    if max_mean == 0 or max_mean < tol * scale:
        return CONSISTENT
    if max_mean > NONMEMBER_TOL * scale:
        return INCONSISTENT
    return INCONCLUSIVE


def membership_test(f, ann, z_samples=20, s_per_z=5, lam=1, tol=MEMBER_TOL,
                    side=RIGHT, rule=None, threads=1, seed=0, pairs=None):
    """Check that the means of f vanish on admissible pairs.

    z_samples is a count of generated centers or an (N, n) array; explicit
    pairs replace the generated ones and must all be admissible.
    """
    if f.n != ann.n:
        raise TwistException("Function on C^{}, annulus in C^{}".format(
            f.n, ann.n), E_DIMENSION)

    if pairs is None:
        if np.ndim(z_samples) == 0:
            z_samples = sample_points(ann.n, int(z_samples),
                                      default_center_radius(ann), seed)
        pairs = sample_pairs(ann, z_samples, s_per_z)
    else:
        for z, s in pairs:
            if not admissible(z, s, ann):
                raise TwistException("Pair |z|={:.6g} s={:.6g} is not "
                                     "admissible".format(
                                         float(np.linalg.norm(z)), s),
                                     E_CONTRACT)

    if not pairs:
        raise TwistException("No admissible pair for the annulus",
                             E_EMPTY_ADMISSIBLE)

    unit = _unit_rule(ann.n, rule)
    records = evaluate_means(f, pairs, lam, unit, side, threads)
    report = MembershipReport(ann, lam, pairs=records, tolerance=tol)
    report.verdict = _mean_verdict(report.max_mean, report.scale, tol)

    LOGGER.info("%s means of %s: max %.3g, scale %.3g -> %s", side, f.name,
                report.max_mean, report.scale, report.verdict)
    return report


def _project(f, grid, unit, bases):
    """Quadrature projections of f(rho .) on every basis, plus L2 norms."""
    weights = unit.weights
    conjugated = [np.conj(basis.values(unit.nodes)) * weights[:, None]
                  for basis in bases]
    projections = [np.zeros((len(grid), len(basis)), dtype=complex)
                   for basis in bases]
    norms = np.zeros(len(grid))

    for row, rho in enumerate(grid):
        values = f.sample(rho * unit.nodes)
        norms[row] = math.sqrt(max(fixed_order_sum(
            weights * np.abs(values) ** 2).real, 0.0))
        for index, matrix in enumerate(conjugated):
            for j in range(matrix.shape[1]):
                projections[index][row, j] = fixed_order_sum(
                    values * matrix[:, j])
    return projections, norms


def _check_grid(grid, ann):
    grid = np.asarray(grid, dtype=float)
    if len(grid) == 0 or not np.all(ann.contains(grid)):
        raise TwistException("Radius grid leaves the annulus", E_CONTRACT)
    return grid


def _warn_order(f, unit, degree):
    if f.degree is not None and unit.order < f.degree + degree:
        LOGGER.warning("rule order %d is below the declared degree %d of "
                       "%s plus %d", unit.order, f.degree, f.name, degree)


def extract_coefficients(f, ann, p, q, grid=None, rule=None):
    """a_j^{p,q}(rho) = integral of f(rho w) conj(Y_j(w)) for each j."""
    grid = _check_grid(default_grid(ann) if grid is None else grid, ann)
    unit = _unit_rule(ann.n, rule)
    _warn_order(f, unit, p + q)

    basis = orthonormal_basis(ann.n, p, q)
    projections, dummy = _project(f, grid, unit, [basis])
    weight = grid ** (-(p + q))

    res = []
    for j in range(len(basis)):
        raw = SampledProfile(grid, projections[0][:, j])
        res.append(HarmonicCoefficient(p, q, j, raw, raw.weighted(weight)))
    return res


def fit_verdict(report, tol):
    """Three-way verdict from the fit residuals; flags ill-conditioning."""
    residual = report.max_residual
    if any(record.fit.ill_conditioned for record in report.fits):
        report.flags.append(FLAG_ILL_CONDITIONED)
    if residual > NONMEMBER_TOL:
        return NON_MEMBER
    if residual < tol and FLAG_ILL_CONDITIONED not in report.flags:
        return MEMBER
    return INCONCLUSIVE


def characterize(f, ann, pq_list, grid=None, rule=None, lam=1,
                 tol=MEMBER_TOL, two_sided=False, side=RIGHT):
    """Fit every coefficient a~_j^{p,q} against its admissible profiles.

    side=LEFT fits against the basis of the left means, i.e. with p and q
    swapped; two_sided truncates the basis to min(p, q) terms per family.
    """
    if f.n != ann.n:
        raise TwistException("Function on C^{}, annulus in C^{}".format(
            f.n, ann.n), E_DIMENSION)

    grid = _check_grid(default_grid(ann) if grid is None else grid, ann)
    unit = _unit_rule(ann.n, rule)
    pq_list = [tuple(pq) for pq in pq_list]
    bases = [orthonormal_basis(ann.n, p, q) for p, q in pq_list]
    projections, norms = _project(f, grid, unit, bases)

    report = MembershipReport(ann, lam, tolerance=tol)
    for (p, q), basis, values in zip(pq_list, bases, projections):
        _warn_order(f, unit, p + q)
        weight = grid ** (-(p + q))
        floor = NOISE_FLOOR * float(np.linalg.norm(norms * weight))
        if side == LEFT:
            profiles = characterization_basis(ann.n, q, p, lam, two_sided)
        else:
            profiles = characterization_basis(ann.n, p, q, lam, two_sided)
        for j in range(len(basis)):
            samples = SampledProfile(grid, values[:, j] * weight)
            fit = fit_profile(samples, profiles, floor)
            report.fits.append(FitRecord(p, q, j, fit, samples))

    report.verdict = fit_verdict(report, tol)
    LOGGER.info("characterization of %s: max residual %.3g -> %s", f.name,
                report.max_residual, report.verdict)
    return report


def two_sided_characterize(f, ann, pq_list, grid=None, rule=None, lam=1,
                           tol=MEMBER_TOL, z_samples=8, s_per_z=3,
                           threads=1, seed=0):
    """Two-sided test: truncated fits plus vanishing left and right means."""
    report = characterize(f, ann, pq_list, grid, rule, lam, tol,
                          two_sided=True)
    fits = report.verdict

    verdicts = []
    for side in (RIGHT, LEFT):
        means = membership_test(f, ann, z_samples, s_per_z, lam, tol, side,
                                rule, threads, seed)
        report.pairs.extend(means.pairs)
        verdicts.append(means.verdict)

    if fits == NON_MEMBER or INCONSISTENT in verdicts:
        report.verdict = NON_MEMBER
    elif fits == MEMBER and all(v == CONSISTENT for v in verdicts):
        report.verdict = MEMBER
    else:
        report.verdict = INCONCLUSIVE
    return report


def euclidean_characterize(g, ann, k_list, grid=None, rule=None,
                           tol=MEMBER_TOL):
    """Fit degree-k coefficients of g on R^2n against rho^(k-2n-2i).

    Degree-k harmonics are taken as the union of the H_{p,k-p}.
    """
    grid = _check_grid(default_grid(ann) if grid is None else grid, ann)
    unit = _unit_rule(ann.n, rule)

    blocks = [(k, p) for k in k_list for p in range(k + 1)]
    bases = [orthonormal_basis(ann.n, p, k - p) for k, p in blocks]
    projections, norms = _project(g, grid, unit, bases)
    floor = NOISE_FLOOR * float(np.linalg.norm(norms))

    report = MembershipReport(ann, 0, tolerance=tol)
    for (k, p), basis, values in zip(blocks, bases, projections):
        profiles = euclidean_basis(2 * ann.n, k)
        for j in range(len(basis)):
            samples = SampledProfile(grid, values[:, j])
            fit = fit_profile(samples, profiles, floor)
            report.fits.append(FitRecord(p, k - p, j, fit, samples))

    report.verdict = fit_verdict(report, tol)
    return report


def _envelope(f, points, lam):
    """Declared bound min_k C_k |w|^-k e^(-lam |w|^2/4) at the points."""
    radius = np.sqrt(np.sum(np.abs(points) ** 2, axis=1))
    bound = np.full(len(points), np.inf)
    with np.errstate(divide="ignore", over="ignore"):
        for k, constant in f.decay.items():
            bound = np.minimum(bound, float(constant) * radius ** (-k) *
                               np.exp(-float(lam) * radius ** 2 / 4))
    return bound


def _probe(f, lower, step, lam, seed):
    """Sample f beyond a radius; return (max |f|, decay bound exceeded)."""
    radii = np.array([lower + 2 * step, lower + 0.5, lower + 1.0,
                      lower + 2.0])
    directions = low_discrepancy_directions(f.n, 16, seed)
    points = (directions[None, :, :] * radii[:, None, None]).reshape(-1, f.n)
    values = np.abs(f.sample(points))
    exceeded = False
    if f.decay:
        exceeded = bool(np.any(values > _envelope(f, points, lam) *
                               (1 + 1e-9)))
    return float(np.max(values)), exceeded


def support_radius(f, r_max, step=0.05, tol=MEMBER_TOL, lam=1, z_count=6,
                   z_radius=1.0, offsets=(0.01, 0.1, 0.5, 1.0),
                   two_sided=False, euclidean=False, rule=None, threads=1,
                   seed=0):
    """Smallest grid radius r whose means vanish for all s > r + |z|.

    The tolerance scale per radius is the largest |f| (or declared decay
    bound) on the tested spheres. After the scan f is probed beyond the
    estimate: nonzero values there while the means vanish mean the decay
    hypothesis does not hold for f.
    """
    unit = _unit_rule(f.n, rule)
    centers = sample_points(f.n, z_count, z_radius, seed)
    if euclidean:
        sides, lam = (EUCLIDEAN,), 0
    elif two_sided:
        sides = (RIGHT, LEFT)
    else:
        sides = (RIGHT,)

    def task(pair):
        z, s, side = pair
        sphere = unit.scaled(s)
        mean, sup = spherical_mean(f, z, s, lam, sphere, side)
        if f.decay:
            shifted = (z[None, :] + sphere.nodes) if side == EUCLIDEAN \
                else (z[None, :] - sphere.nodes)
            sup = max(sup, float(np.max(_envelope(f, shifted, lam))))
        return abs(mean), sup, z, s, side

    scans = []
    radius = None
    count = int(math.floor(r_max / step + 1e-9))
    for index in range(count + 1):
        r = index * step
        pairs = [(z, r + float(np.linalg.norm(z)) + offset, side)
                 for z in centers for offset in offsets for side in sides]
        results = _run_ordered(task, pairs, threads)
        scale = max(result[1] for result in results)
        worst = max(results, key=lambda result: result[0])
        passed = worst[0] == 0 or worst[0] <= tol * scale
        scans.append({"r": r, "max_mean": worst[0], "scale": scale,
                      "passed": passed,
                      "worst": {"z": [[float(c.real), float(c.imag)]
                                      for c in worst[2]],
                                "s": worst[3], "side": worst[4]}})
        LOGGER.debug("support scan r=%.3f max mean %.3g scale %.3g", r,
                     worst[0], scale)
        if passed:
            radius = r
            break

    flags = []
    decay_required = not (two_sided and f.n == 1)
    if decay_required and not f.decay:
        flags.append(FLAG_DECAY_MISSING)

    if radius is None:
        LOGGER.info("no support detected up to %.3f", r_max)
        return SupportReport(None, NO_SUPPORT, scans, flags, None)

    probe_max, exceeded = _probe(f, radius, step, lam, seed)
    verdict = CLEAN
    if exceeded:
        flags.append(FLAG_DECAY_EXCEEDED)
    if probe_max > 0:
        flags.append(FLAG_DECAY_VIOLATED if decay_required
                     else FLAG_SUPPORT_CONTRADICTED)
        verdict = HYPOTHESIS_VIOLATED if decay_required else INCONCLUSIVE

    LOGGER.info("support radius of %s: %.3f (%s)", f.name, radius, verdict)
    return SupportReport(radius, verdict, scans, flags, probe_max)


def helgason_support_check(g, r_max, step=0.05, tol=MEMBER_TOL, z_count=6,
                           z_radius=1.0, offsets=(0.01, 0.1, 0.5, 1.0),
                           rule=None, threads=1, seed=0):
    """Euclidean support scan: plain sphere averages, decay sup |x|^k|g|."""
    return support_radius(g, r_max, step, tol, 0, z_count, z_radius,
                          offsets, euclidean=True, rule=rule,
                          threads=threads, seed=seed)
