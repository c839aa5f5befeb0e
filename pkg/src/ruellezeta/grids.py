"""Distribution grids: zeta residues over lattices of Gaussian targets.

A smoothed invariant Ruelle distribution evaluated against a family of
Gaussian bumps is one residue of the weighted zeta per bump, all at the
same resonance.  At beta = 0 the determinant value and the
lambda-derivative never see the weight, so they are computed once per
factor; only the beta-derivative varies over the grid, and that is a
(targets x orbits) Gaussian sum matrix from kernels times a fixed
vector (cycle.bell_transfer).  A 50 x 50 grid therefore costs one
kernel pass plus a matrix-vector product per vanishing factor, and a
point that fails the simple-pole test is masked instead of aborting
the run.

Section grids live on boundary pairs (x_minus, x_plus) taken from two
distinct fundamental intervals; base grids on an upper half-plane
rectangle with points inside the fundamental discs masked away.  Axis
refinement narrows the sampled intervals, either to the letter images
g_k(I_j) (one cylinder generation) or to explicit user bounds.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import cycle
from .schottky import Interval
from .symmetry import trivial_group
from .weights import WeightSpec

#: relative-error target when the truncation order is chosen adaptively
GRID_TRUNCATION_TOL = 1e-9
TRUNCATION_START = 4
TRUNCATION_CAP = 12
#: containment slack for refined intervals, relative to the container
CONTAINMENT_SLACK = 1e-9
#: targets evaluated per kernel call; bounds the integrals matrix
_CHUNK = 2048

REFINEMENT_MODES = ("full", "level1", "explicit")


class GridError(ValueError):
    """Raised for invalid grid domains or failed truncation choices."""


@dataclass(frozen=True)
class DistributionGrid:
    """One evaluated grid.

    ``coords`` is (P, 2) float for section grids (x_minus, x_plus rows)
    and (P,) complex for base grids, row-major over the sampled lattice.
    ``mask`` is True where the value is trustworthy; masked points carry
    the value 0.  ``metadata`` holds only str/int/float entries so it
    survives a round trip through the CSV header lines.
    """

    coords: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    metadata: dict


@dataclass(frozen=True)
class RefinementSpec:
    """Per-axis narrowing of the sampled boundary intervals.

    "full" keeps every fundamental interval on both axes.  "level1"
    replaces axis a by the images g_k(I_j) of all admissible intervals
    under the letter k = letters[a]; the images land inside the interval
    of the inverse letter.  "explicit" takes user bounds per axis: a
    single (lo, hi) pair or a sequence of them.
    """

    mode: str = "full"
    letters: tuple = ()
    bounds: tuple = ()

    def __post_init__(self):
        if self.mode not in REFINEMENT_MODES:
            raise GridError("unknown refinement mode %r" % (self.mode,))
        if self.mode == "level1" and len(self.letters) != 2:
            raise GridError("level1 refinement needs one letter per axis")
        if self.mode == "explicit" and len(self.bounds) != 2:
            raise GridError("explicit refinement needs bounds per axis")


def describe_refinement(spec):
    if spec.mode == "full":
        return "full"
    if spec.mode == "level1":
        return "level1:%d,%d" % tuple(spec.letters)
    parts = []
    for axis in spec.bounds:
        pairs = _as_pairs(axis)
        parts.append(";".join("%.17g:%.17g" % (lo, hi) for lo, hi in pairs))
    return "explicit:" + "|".join(parts)


def _as_pairs(axis_bounds):
    # accept one bare (lo, hi) pair or a sequence of pairs
    seq = tuple(axis_bounds)
    if len(seq) == 2 and not hasattr(seq[0], "__len__"):
        return (tuple(seq),)
    return tuple(tuple(p) for p in seq)


def _require_inside(sub, outer, label):
    slack = CONTAINMENT_SLACK * max(1.0, outer.hi - outer.lo)
    if not (outer.contains(sub.lo, slack) and outer.contains(sub.hi, slack)):
        raise GridError(
            "%s = [%.12g, %.12g] is not contained in [%.12g, %.12g]"
            % (label, sub.lo, sub.hi, outer.lo, outer.hi))


def _letter_images(surface, k):
    """Images g_k(I_j), j != k, sitting inside the inverse letter's
    interval; one generation of the cylinder refinement."""
    if not 0 <= k < surface.n_letters:
        raise GridError("letter %d outside 0..%d" % (k, surface.n_letters - 1))
    g = surface.generators[k]
    home = surface.intervals[surface.inverse_letter(k)]
    images = []
    for j, iv in enumerate(surface.intervals):
        if j == k:
            # I_k surrounds the pole of g_k; its image wraps through
            # infinity and is not an interval
            continue
        a, b = g.apply(iv.lo), g.apply(iv.hi)
        img = Interval(min(a, b), max(a, b))
        _require_inside(img, home, "image g_%d(I_%d)" % (k, j))
        images.append(img)
    images.sort()
    return images


def _explicit_axis(surface, axis_bounds):
    out = []
    for lo, hi in _as_pairs(axis_bounds):
        lo, hi = float(lo), float(hi)
        if not lo < hi:
            raise GridError("empty explicit interval [%g, %g]" % (lo, hi))
        sub = Interval(lo, hi)
        for iv in surface.intervals:
            slack = CONTAINMENT_SLACK * max(1.0, iv.hi - iv.lo)
            if iv.contains(lo, slack) and iv.contains(hi, slack):
                break
        else:
            raise GridError("explicit interval [%g, %g] lies in no "
                            "fundamental interval" % (lo, hi))
        out.append(sub)
    return out


def refine_intervals(surface, spec):
    """Subintervals to sample, one list per section axis."""
    if spec.mode == "full":
        return list(surface.intervals), list(surface.intervals)
    if spec.mode == "level1":
        return tuple(_letter_images(surface, int(k)) for k in spec.letters)
    return tuple(_explicit_axis(surface, b) for b in spec.bounds)


def _owner(surface, interval):
    mid = 0.5 * (interval.lo + interval.hi)
    for idx, iv in enumerate(surface.intervals):
        if iv.contains(mid):
            return idx
    raise GridError("interval [%g, %g] lies in no fundamental interval"
                    % (interval.lo, interval.hi))


def _axis_points(surface, intervals, resolution):
    if resolution < 2:
        raise GridError("resolution must be at least 2 per axis")
    pts, owner = [], []
    for iv in intervals:
        idx = _owner(surface, iv)
        for x in np.linspace(iv.lo, iv.hi, resolution):
            pts.append(float(x))
            owner.append(idx)
    return pts, owner


def section_targets(surface, resolution, refinement=None):
    """Flat (P, 2) array of (x_minus, x_plus) pairs over all admissible
    interval combinations, minus axis outer, plus axis inner."""
    spec = refinement if refinement is not None else RefinementSpec()
    axis_minus, axis_plus = refine_intervals(surface, spec)
    pts_m, own_m = _axis_points(surface, axis_minus, resolution)
    pts_p, own_p = _axis_points(surface, axis_plus, resolution)
    coords = [(x, y) for x, i in zip(pts_m, own_m)
              for y, j in zip(pts_p, own_p) if i != j]
    if not coords:
        raise GridError("every coordinate pair fell inside one fundamental "
                        "interval; the section excludes the diagonal")
    return np.array(coords)


def _factors(cache):
    return cache.group.characters if cache.group.size > 1 else (None,)


def residue_grid(cache, lambda0, targets, weight_scale=1.0):
    """Zeta residues at lambda0 for a whole batch of weight targets.

    Matches cycle.residue_simple point for point (up to the matrix
    association of the sums): every determinant factor vanishing at
    lambda0 contributes d_beta/d_lambda.  Returns (values, ok) where
    points failing the per-point simple-pole test are masked in ok and
    zeroed, not raised.
    """
    lam0 = complex(lambda0)
    factors = []
    for ch in _factors(cache):
        val_a, dl_a, mmat = cycle._coeff_tables(cache, lam0, ch)
        jets = [cycle.Jet1(val_a[i], dl_a[i]) for i in range(cache.nmax)]
        det = cycle.bell_recursion(jets, lam=lam0).determinant
        if abs(det.value) > cycle.LOCATED_TOL * abs(det.d_lambda):
            continue
        _, transfer = cycle.bell_transfer(val_a)
        factors.append((det.d_lambda, mmat @ transfer.sum(axis=0)))
    if not factors:
        raise GridError("no determinant factor vanishes at %s; grids "
                        "evaluate at located zeros only" % (lam0,))
    npts = len(targets)
    values = np.zeros(npts, dtype=complex)
    ok = np.ones(npts, dtype=bool)
    for lo in range(0, npts, _CHUNK):
        hi = min(npts, lo + _CHUNK)
        integrals = cycle.weight_integrals(cache, targets[lo:hi])
        if weight_scale != 1.0:
            integrals = integrals * weight_scale
        for d_lambda, rvec in factors:
            contrib = integrals @ rvec
            ok[lo:hi] &= abs(d_lambda) >= cycle.SIMPLE_POLE_TOL * np.abs(contrib)
            values[lo:hi] += contrib / d_lambda
    ok &= np.isfinite(values.real) & np.isfinite(values.imag)
    values[~ok] = 0.0
    return values, ok


def _probe_error(cache, lam0, probes, n):
    """Worst relative error over the probes, taken on the factors that
    vanish at lam0; inf when no factor vanishes yet at this truncation."""
    worst = 0.0
    found = False
    for ch in _factors(cache):
        det = cycle.determinant(cache, lam0, chi=ch, target=probes[0])
        if abs(det.value) > cycle.LOCATED_TOL * abs(det.d_lambda):
            continue
        found = True
        for t in probes:
            series = cycle.evaluate_series(cache, lam0, chi=ch, target=t)
            worst = max(worst, cycle.relative_error(series, n))
    return worst if found else math.inf


def _adaptive_cache(surface, group, lam0, weight, probes, n, tol):
    """One truncation order for the whole grid, chosen at the probe
    targets (grid center and corners); explicit n short-circuits."""
    if n is not None:
        return cycle.build_cache(surface, group, n, weight)
    worst = math.inf
    for trial in range(TRUNCATION_START, TRUNCATION_CAP + 1):
        cache = cycle.build_cache(surface, group, trial, weight)
        worst = _probe_error(cache, lam0, probes, trial)
        if worst <= tol:
            return cache
    raise GridError("relative error %.3g after N = %d terms, target %.3g"
                    % (worst, TRUNCATION_CAP, tol))


def _section_probes(coords):
    idx = {0, len(coords) - 1, len(coords) // 2,
           int(coords[:, 0].argmin()), int(coords[:, 0].argmax()),
           int(coords[:, 1].argmin()), int(coords[:, 1].argmax())}
    return [tuple(coords[i]) for i in sorted(idx)]


def _base_probes(points):
    idx = {0, len(points) - 1, len(points) // 2,
           int(points.real.argmin()), int(points.real.argmax()),
           int(points.imag.argmin()), int(points.imag.argmax())}
    return [complex(points[i]) for i in sorted(idx)]


def _surface_meta(surface, group, lam0, sigma, nmax, resolution):
    return {
        "surface": surface.describe(),
        "symmetry": "full" if group.size > 1 else "trivial",
        "sigma": float(sigma),
        "nmax": int(nmax),
        "lambda0_re": float(lam0.real),
        "lambda0_im": float(lam0.imag),
        "resolution": int(resolution),
    }


def section_grid(surface, group, lambda0, sigma, resolution, refinement=None,
                 n=None, metric="cayley_angular", tol=GRID_TRUNCATION_TOL,
                 weight_scale=1.0):
    """Distribution grid on the Poincare section of the surface.

    Targets run over (x_minus, x_plus) with the two coordinates in
    distinct fundamental intervals, ``resolution`` points per refined
    subinterval per axis, minus axis outer.  One cache serves the whole
    grid; ``n`` fixes its truncation order, None picks it adaptively.
    ``weight_scale`` scales the test weight linearly (0 gives the zero
    grid, a quick sanity toggle).
    """
    if group is None:
        group = trivial_group(surface.rank)
    spec = refinement if refinement is not None else RefinementSpec()
    coords = section_targets(surface, resolution, spec)
    lam0 = complex(lambda0)
    weight = WeightSpec(kind="gauss_section", sigma=sigma,
                        symmetrize=group.size > 1, boundary_metric=metric)
    cache = _adaptive_cache(surface, group, lam0, weight,
                            _section_probes(coords), n, tol)
    values, ok = residue_grid(cache, lam0, coords, weight_scale)
    meta = _surface_meta(surface, group, lam0, sigma, cache.nmax, resolution)
    meta.update(mode="section", weight="gauss_section", metric=metric,
                refinement=describe_refinement(spec))
    if weight_scale != 1.0:
        meta["weight_scale"] = float(weight_scale)
    return DistributionGrid(coords=coords, values=values, mask=ok,
                            metadata=meta)


def base_grid(surface, group, lambda0, sigma, resolution, region, n=None,
              tol=GRID_TRUNCATION_TOL, weight_scale=1.0):
    """Distribution grid on an upper half-plane rectangle.

    ``region`` is (re_lo, re_hi, im_lo, im_hi); points inside any
    fundamental disc are masked and never evaluated, the rest get one
    zeta residue each with the Gaussian bump centered there.
    """
    if group is None:
        group = trivial_group(surface.rank)
    re_lo, re_hi, im_lo, im_hi = (float(v) for v in region)
    if not (re_lo < re_hi and im_lo < im_hi):
        raise GridError("degenerate region %r" % (region,))
    if im_lo <= 0.0:
        raise GridError("region must lie in the upper half-plane")
    if resolution < 2:
        raise GridError("resolution must be at least 2 per axis")
    xs = np.linspace(re_lo, re_hi, resolution)
    ys = np.linspace(im_lo, im_hi, resolution)
    coords = (xs[None, :] + 1j * ys[:, None]).ravel()
    inside = np.ones(coords.shape[0], dtype=bool)
    for disc in surface.discs:
        inside &= np.abs(coords - disc.center) > disc.radius
    lam0 = complex(lambda0)
    weight = WeightSpec(kind="gauss_base", sigma=sigma,
                        symmetrize=group.size > 1)
    values = np.zeros(coords.shape[0], dtype=complex)
    mask = inside.copy()
    nmax = n if n is not None else 0
    if inside.any():
        cache = _adaptive_cache(surface, group, lam0, weight,
                                _base_probes(coords[inside]), n, tol)
        nmax = cache.nmax
        vals, ok = residue_grid(cache, lam0, coords[inside], weight_scale)
        values[inside] = vals
        mask[inside] &= ok
    meta = _surface_meta(surface, group, lam0, sigma, nmax, resolution)
    meta.update(mode="base", weight="gauss_base",
                region="%.17g:%.17g:%.17g:%.17g"
                       % (re_lo, re_hi, im_lo, im_hi))
    if weight_scale != 1.0:
        meta["weight_scale"] = float(weight_scale)
    return DistributionGrid(coords=coords, values=values, mask=mask,
                            metadata=meta)


def error_profile(cache, lambda0, targets, n, chi=None):
    """Grid-mean and grid-max of the order-n relative error.

    Pointwise this is cycle.relative_error on the series at each target:
    the ratio |d_n|/|d_0 + .. + d_n| on the beta components, the parts
    that actually carry the weight (and hence coordinate) dependence.
    The scalar fallback for a weightless series is target independent
    and computed once.
    """
    if not 1 <= n <= cache.nmax:
        raise GridError("order %d outside 1..%d" % (n, cache.nmax))
    lam0 = complex(lambda0)
    val_a, _, mmat = cycle._coeff_tables(cache, lam0, chi)
    val_d, transfer = cycle.bell_transfer(val_a)
    rows = transfer[:n + 1]
    num_v = abs(val_d[n])
    den_v = abs(val_d[:n + 1].sum())
    fallback = _ratio(num_v, den_v)
    npts = len(targets)
    errs = np.empty(npts)
    for lo in range(0, npts, _CHUNK):
        hi = min(npts, lo + _CHUNK)
        db_a = cycle.weight_integrals(cache, targets[lo:hi]) @ mmat
        db_d = db_a @ rows.T
        num = np.abs(db_d[:, n])
        den = np.abs(db_d.sum(axis=1))
        block = np.empty(hi - lo)
        for i in range(hi - lo):
            if num[i] == 0.0 and den[i] == 0.0:
                block[i] = fallback
            else:
                block[i] = _ratio(num[i], den[i])
        errs[lo:hi] = block
    return float(errs.mean()), float(errs.max())


def _ratio(num, den):
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den
