"""Dynamical determinant, weighted zeta function, and residues.

Everything is organized around a cache of prime orbit data: per orbit
the word length n_w, the twist order m_w, the length T of the iterated
geodesic, and the weight geometry.  A coefficient a_m collects one term
for every orbit whose n_w divides m, so the cache also carries flat
term arrays (one row per (orbit, m) pair) that a single vectorized pass
turns into all coefficients at once.

Derivatives in lambda and in the weight coupling beta ride along as
first-order jets.  The beta derivative is the only target-dependent
part: the coefficient values at beta = 0 never see the weight, which is
what makes whole-grid evaluation a matrix product (see grids).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .moebius import boundary_angle, displacement_length
from .schottky import cyclic_classes, word_to_map
from .symmetry import orbit_representatives, trivial_group
from .weights import (WeightError, WeightSpec, period_integral,
                      precompute_geometry)

#: determinant magnitudes below this count as sitting on a zero
POLE_PROXIMITY_TOL = 1e-300
#: |value|/|d_lambda| Newton step accepted as "lambda0 is this zero"
LOCATED_TOL = 1e-6
#: residue denominators smaller than this times |d_beta| are rejected
SIMPLE_POLE_TOL = 1e-10


class CycleError(ValueError):
    """Raised for invalid coefficient or residue evaluations."""


class Jet1:
    """First-order jet in (lambda, beta): a value and the two partials."""

    __slots__ = ("value", "d_lambda", "d_beta")

    def __init__(self, value, d_lambda=0j, d_beta=0j):
        self.value = complex(value)
        self.d_lambda = complex(d_lambda)
        self.d_beta = complex(d_beta)

    def __add__(self, other):
        if isinstance(other, Jet1):
            return Jet1(self.value + other.value,
                        self.d_lambda + other.d_lambda,
                        self.d_beta + other.d_beta)
        return Jet1(self.value + other, self.d_lambda, self.d_beta)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet1):
            return Jet1(self.value - other.value,
                        self.d_lambda - other.d_lambda,
                        self.d_beta - other.d_beta)
        return Jet1(self.value - other, self.d_lambda, self.d_beta)

    def __mul__(self, other):
        if isinstance(other, Jet1):
            return Jet1(
                self.value * other.value,
                self.d_lambda * other.value + self.value * other.d_lambda,
                self.d_beta * other.value + self.value * other.d_beta)
        return Jet1(self.value * other, self.d_lambda * other,
                    self.d_beta * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Jet1(-self.value, -self.d_lambda, -self.d_beta)

    def __repr__(self):
        return "Jet1(%r, d_lambda=%r, d_beta=%r)" % (
            self.value, self.d_lambda, self.d_beta)


@dataclass(frozen=True)
class GeodesicCache:
    """Read-only orbit data for one (surface, group, N, weight) choice.

    The term arrays have one entry per (orbit, m) pair with m <= nmax a
    multiple of the orbit's n_w, in canonical orbit order with ascending
    m inside each orbit.  Geometry arrays are flattened per orbit for
    the kernels; which set is populated depends on the weight kind.
    """

    surface: object
    group: object
    nmax: int
    weight: WeightSpec
    reps: tuple
    lengths: np.ndarray        # (R,) length of the iterate geodesic
    geometries: tuple          # WordGeometry per orbit, () for constant
    n_translates: int
    term_m: np.ndarray
    term_rep: np.ndarray
    term_x: np.ndarray         # (m / (n_w m_w)) * T
    term_s: np.ndarray         # m / (n_w m_w)
    term_base: np.ndarray      # -n_w / m
    term_twist: np.ndarray     # element index of twist^(m/n_w)
    geo_offsets: np.ndarray = None
    base_entries: tuple = None     # (a, b, c, d, det) flat arrays
    section_coords: tuple = None   # (minus, plus) flat arrays
    section_wrap: bool = True


def _freeze(arr):
    arr.setflags(write=False)
    return arr


def build_cache(surface, group, nmax, weight):
    """Collect every prime orbit with n_w <= nmax plus its term rows."""
    if nmax < 1:
        raise CycleError("truncation order must be at least 1")
    if group is None:
        group = trivial_group(surface.rank)
    if group.size > 1 and weight.kind != "constant" and not weight.symmetrize:
        # constant weights are G-invariant by definition; the Gaussian
        # families factor over characters only when symmetrized
        raise CycleError("symmetrized weights required")
    reps = orbit_representatives(surface, group, nmax)
    lengths = np.array([displacement_length(word_to_map(surface, r.iterate))
                        for r in reps])

    rows_m, rows_rep, rows_x, rows_s, rows_base, rows_twist = \
        [], [], [], [], [], []
    for idx, rep in enumerate(reps):
        k = 1
        while k * rep.n_w <= nmax:
            m = k * rep.n_w
            s = m / (rep.n_w * rep.m_w)
            rows_m.append(m)
            rows_rep.append(idx)
            rows_s.append(s)
            rows_x.append(s * lengths[idx])
            rows_base.append(-rep.n_w / m)
            rows_twist.append(group.power(rep.rep.twist, k))
            k += 1

    geometries = ()
    geo_offsets = None
    base_entries = None
    section_coords = None
    n_translates = group.size if weight.symmetrize and group.size > 1 else 1
    if weight.kind != "constant":
        geometries = tuple(
            precompute_geometry(surface, group, rep.iterate, weight)
            for rep in reps)
        offsets = [0]
        if weight.kind == "gauss_base":
            cols = [[], [], [], [], []]
            for geom in geometries:
                for m in geom.maps:
                    for col, v in zip(cols, (m.a, m.b, m.c, m.d, m.det)):
                        col.append(v)
                offsets.append(len(cols[0]))
            base_entries = tuple(_freeze(np.array(c)) for c in cols)
        else:
            wrap = weight.boundary_metric == "cayley_angular"
            mi, pl = [], []
            for geom in geometries:
                for rep_pt, att_pt in geom.pairs:
                    if wrap:
                        mi.append(boundary_angle(rep_pt))
                        pl.append(boundary_angle(att_pt))
                    else:
                        mi.append(rep_pt)
                        pl.append(att_pt)
                offsets.append(len(mi))
            section_coords = (_freeze(np.array(mi)), _freeze(np.array(pl)))
        geo_offsets = _freeze(np.array(offsets, dtype=np.int64))

    return GeodesicCache(
        surface=surface, group=group, nmax=nmax, weight=weight,
        reps=tuple(reps), lengths=_freeze(lengths), geometries=geometries,
        n_translates=n_translates,
        term_m=_freeze(np.array(rows_m, dtype=np.int64)),
        term_rep=_freeze(np.array(rows_rep, dtype=np.int64)),
        term_x=_freeze(np.array(rows_x)),
        term_s=_freeze(np.array(rows_s)),
        term_base=_freeze(np.array(rows_base)),
        term_twist=_freeze(np.array(rows_twist, dtype=np.int64)),
        geo_offsets=geo_offsets, base_entries=base_entries,
        section_coords=section_coords,
        section_wrap=weight.boundary_metric == "cayley_angular")


def _resolve_targets(cache, targets):
    if targets is None:
        if cache.weight.kind == "constant":
            return None
        if cache.weight.target is None:
            raise CycleError("weight of kind %r needs a target"
                             % (cache.weight.kind,))
        return [cache.weight.target]
    return targets


def weight_integrals(cache, targets):
    """(P, R) matrix of weight integrals over every orbit geodesic.

    ``targets`` is a sequence of centers (gauss_base), of (x_minus,
    x_plus) pairs (gauss_section), or None to use the weight's own
    target.  The constant weight ignores targets altogether.
    """
    targets = _resolve_targets(cache, targets)
    spec = cache.weight
    if spec.kind == "constant":
        npts = 1 if targets is None else len(targets)
        return np.broadcast_to(cache.lengths, (npts, len(cache.reps)))
    if spec.kind == "gauss_base":
        pts = np.asarray(targets, dtype=complex)
        if np.any(pts.imag <= 0.0):
            raise WeightError("center must lie in the upper half-plane")
        a, b, c, d, det = cache.base_entries
        raw = kernels.base_sums(a, b, c, d, det, cache.geo_offsets,
                                pts.real, pts.imag, spec.sigma)
        return raw / (math.sqrt(math.pi) * spec.sigma * cache.n_translates)
    pts = np.asarray(targets, dtype=float)
    if cache.section_wrap:
        gm = np.arctan2(-2.0 * pts[:, 0], pts[:, 0] ** 2 - 1.0)
        gp = np.arctan2(-2.0 * pts[:, 1], pts[:, 1] ** 2 - 1.0)
    else:
        gm, gp = pts[:, 0], pts[:, 1]
    mi, pl = cache.section_coords
    raw = kernels.section_sums(mi, pl, cache.geo_offsets, gm, gp,
                               spec.sigma, cache.section_wrap)
    return raw / (math.pi * spec.sigma ** 2 * cache.n_translates)


def _character_list(cache, chi):
    # chi=None collapses the character sum, which by orthogonality is
    # exactly the unreduced coefficient set
    return cache.group.characters if chi is None else (chi,)


def _coeff_tables(cache, lam, chi):
    """Per-order tables: values, lambda-derivatives, and the (R, N)
    matrix sending orbit integrals to the beta-derivatives."""
    x = cache.term_x
    em = np.expm1(-x)
    # e^{-(lam-1)x} / (e^x - 1)^2 written with a single decaying
    # exponential; the naive form overflows e^x first
    ex = np.exp(-(complex(lam) + 1.0) * x) / (em * em)
    nmax = cache.nmax
    idx = cache.term_m - 1
    val = np.zeros(nmax, dtype=complex)
    dl = np.zeros(nmax, dtype=complex)
    mmat = np.zeros((len(cache.reps), nmax), dtype=complex)
    for ch in _character_list(cache, chi):
        chi_vals = np.asarray(ch.values)[cache.term_twist]
        c = (ch.dimension * cache.term_base) * chi_vals * ex
        np.add.at(val, idx, c)
        np.add.at(dl, idx, -x * c)
        np.add.at(mmat, (cache.term_rep, idx), -cache.term_s * c)
    return val, dl, mmat


def coeff_a_chi(cache, m, lam, chi, target=None):
    """Symmetry-reduced coefficient a_m for one character, as a jet."""
    if not 1 <= m <= cache.nmax:
        raise CycleError("coefficient order %d outside 1..%d"
                         % (m, cache.nmax))
    val, dl, mmat = _coeff_tables(cache, lam, chi)
    integrals = weight_integrals(cache, [target] if target is not None
                                 else None)
    db = integrals[0] @ mmat
    return Jet1(val[m - 1], dl[m - 1], db[m - 1])


def coeff_a(cache, k, lam, target=None):
    """Unreduced coefficient a_k as a jet (character sum collapses the
    twisted orbit data back to plain cyclic classes)."""
    return coeff_a_chi(cache, k, lam, None, target)


@dataclass(frozen=True)
class CoefficientSeries:
    """Taylor data d_0..d_N of one determinant factor at fixed lambda."""

    lam: complex
    label: str
    a: tuple
    d: tuple

    def partial_sum(self, n):
        out = Jet1(0.0)
        for term in self.d[:n + 1]:
            out = out + term
        return out

    @property
    def determinant(self):
        return self.partial_sum(len(self.d) - 1)


def bell_recursion(a, lam=0j, label=""):
    """Run d_n = sum_k (k/n) d_{n-k} a_k over jets, d_0 = 1."""
    a = tuple(a)
    d = [Jet1(1.0)]
    for n in range(1, len(a) + 1):
        acc = Jet1(0.0)
        for k in range(1, n + 1):
            acc = acc + (k / n) * (d[n - k] * a[k - 1])
        d.append(acc)
    return CoefficientSeries(lam=complex(lam), label=label, a=a, d=tuple(d))


def evaluate_series(cache, lam, chi=None, target=None, n=None):
    """Coefficient series for one character (or the collapsed sum)."""
    if n is None:
        n = cache.nmax
    if not 1 <= n <= cache.nmax:
        raise CycleError("truncation order %d outside 1..%d"
                         % (n, cache.nmax))
    val, dl, mmat = _coeff_tables(cache, lam, chi)
    integrals = weight_integrals(cache, [target] if target is not None
                                 else None)
    db = integrals[0] @ mmat
    a = [Jet1(val[i], dl[i], db[i]) for i in range(n)]
    label = "all" if chi is None else chi.label
    return bell_recursion(a, lam=lam, label=label)


def determinant(cache, lam, chi=None, target=None, n=None):
    """Truncated determinant D_N(lambda) = 1 + sum d_n as a jet."""
    return evaluate_series(cache, lam, chi=chi, target=target,
                           n=n).determinant


def _determinant_jets(cache, lam, target):
    """One determinant jet per factor: per character when the group is
    nontrivial, the single unreduced determinant otherwise."""
    if cache.group.size > 1:
        return [determinant(cache, lam, chi=ch, target=target)
                for ch in cache.group.characters]
    return [determinant(cache, lam, target=target)]


def zeta(cache, lam, target=None):
    """Weighted zeta value: the beta log-derivative of the determinant,
    split over characters when symmetry reduction is active."""
    total = 0j
    for jet in _determinant_jets(cache, lam, target):
        if abs(jet.value) <= POLE_PROXIMITY_TOL:
            raise CycleError(
                "pole proximity: determinant magnitude %.3g at lambda %s"
                % (abs(jet.value), lam))
        total += jet.d_beta / jet.value
    return total


def direct_zeta_sum(surface, lam, weight, nmax, group=None):
    """Brute-force zeta sum over closed geodesics of word length <= nmax.

    Every cyclic class of every length contributes once, iterates
    included, each weighted by the integral over its primitive geodesic.
    Absolute convergence is only guaranteed well right of the critical
    axis, hence the hard precondition.
    """
    lam = complex(lam)
    if lam.real < 2.0:
        raise CycleError("direct zeta sum needs Re(lambda) >= 2, got %s"
                         % (lam,))
    if weight.symmetrize and (group is None or group.size < 2):
        raise CycleError("symmetrized weight needs its symmetry group")
    total = 0j
    for n in range(1, nmax + 1):
        for cls in cyclic_classes(surface, n):
            if not cls.primitive:
                continue
            word = cls.representative
            t_prim = displacement_length(word_to_map(surface, word))
            if weight.kind == "constant":
                integral = t_prim
            else:
                geom = precompute_geometry(surface, group, word, weight)
                integral = period_integral(surface, geom, weight, None)
            k = 1
            while k * n <= nmax:
                t = k * t_prim
                total += (cmath.exp(-lam * t) * integral
                          / (math.expm1(t) * -math.expm1(-t)))
                k += 1
    return total


def residue_simple(cache, lam0, target=None):
    """Residue of the weighted zeta at a located simple resonance.

    Each determinant factor vanishing at lam0 contributes
    d_beta/d_lambda; in symmetry mode several characters may vanish at
    once (split multiplicities) and their contributions add.
    """
    vanishing = []
    for jet in _determinant_jets(cache, lam0, target):
        if abs(jet.value) <= LOCATED_TOL * abs(jet.d_lambda):
            vanishing.append(jet)
    if not vanishing:
        raise CycleError("pole not simple or not located: no determinant "
                         "factor vanishes at %s" % (lam0,))
    total = 0j
    for jet in vanishing:
        if abs(jet.d_lambda) < SIMPLE_POLE_TOL * abs(jet.d_beta):
            raise CycleError("pole not simple or not located: "
                             "d_lambda %.3g vs d_beta %.3g"
                             % (abs(jet.d_lambda), abs(jet.d_beta)))
        total += jet.d_beta / jet.d_lambda
    return total


def residue_contour(cache, lam0, target=None, radius=1e-3, points=128):
    """Residue by trapezoidal quadrature of zeta around a circle.

    The same sweep integrates the determinant log-derivative; its
    winding must report exactly one zero inside the contour, otherwise
    the quadrature would silently mix residues.
    """
    if points < 64:
        raise CycleError("need at least 64 quadrature points")
    zsum = 0j
    wsum = 0j
    for j in range(points):
        phase = cmath.exp(2j * math.pi * j / points)
        lam = lam0 + radius * phase
        for jet in _determinant_jets(cache, lam, target):
            if abs(jet.value) <= POLE_PROXIMITY_TOL:
                raise CycleError("pole proximity: quadrature node %s sits "
                                 "on a determinant zero" % (lam,))
            zsum += (jet.d_beta / jet.value) * phase
            wsum += (jet.d_lambda / jet.value) * phase
    count = wsum * radius / points
    if abs(count - 1.0) > 0.1:
        raise CycleError("zero count %.3g%+.3gi != 1 inside contour"
                         % (count.real, count.imag))
    return zsum * radius / points


def relative_error(series, n):
    """Size of term n against the partial sum through n.

    Taken on the beta-derivative components, the part that feeds the
    distribution values and genuinely depends on the target.  A zero
    numerator reports 0: in particular a target so far from every
    geodesic that all its weight integrals underflow has an identically
    zero beta series, and its truncation error really is zero.  (The
    value components are useless as a fallback here: at a resonance the
    value partial sum is the quantity that vanishes.)
    """
    if not 1 <= n <= len(series.d) - 1:
        raise CycleError("order %d outside 1..%d" % (n, len(series.d) - 1))
    nb = abs(series.d[n].d_beta)
    db = abs(series.partial_sum(n).d_beta)
    if nb == 0.0:
        return 0.0
    if db == 0.0:
        return math.inf
    return nb / db


def bell_transfer(val_a):
    """Value components d_0..d_N plus the matrix C with db_d = C @ db_a.

    The beta derivative never feeds back into the beta = 0 values, so
    each db(d_n) is a fixed linear functional of the db(a_k); the grid
    evaluators turn this into one matrix product per target plane.
    """
    nmax = len(val_a)
    val_d = np.zeros(nmax + 1, dtype=complex)
    val_d[0] = 1.0
    transfer = np.zeros((nmax + 1, nmax), dtype=complex)
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            w = k / n
            val_d[n] += w * val_d[n - k] * val_a[k - 1]
            transfer[n] += w * val_a[k - 1] * transfer[n - k]
            transfer[n, k - 1] += w * val_d[n - k]
    return val_d, transfer
