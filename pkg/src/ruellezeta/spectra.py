"""Resonance localization: argument-principle counting plus Newton.

A determinant evaluator here is any callable lambda -> Jet1; the jets
carry exact lambda-derivatives, so winding integrals of D'/D need no
finite differencing.  The scan driver subdivides a rectangle quadtree
style, counts zeros per cell, and polishes terminal cells with Newton.
"""

import cmath
import math
from dataclasses import dataclass

from . import cycle

#: minimum quadrature nodes per unit of contour length
CONTOUR_DENSITY = 200.0
#: nodes per edge never drop below this, however small the cell
MIN_EDGE_POINTS = 32
#: reject windings farther than this from an integer
WINDING_TOL = 0.1
#: Newton step size that counts as converged, relative to |lambda|
#: (absolute near the origin); phase factors exp(-i Im(lambda) x) limit
#: attainable steps to ~|lambda| eps, so an absolute cutoff would spin
#: forever on high-imaginary resonances
NEWTON_STEP_TOL = 1e-12
NEWTON_MAX_ITER = 50
#: |value|/|d_lambda| below this flags a zero hugging the contour
BOUNDARY_ZERO_TOL = 1e-6
#: matching radius when merging duplicate zeros from adjacent cells
DEDUPE_TOL = 1e-8
#: boundary shift factor on a failed count (kept clear of halves so a
#: re-shifted edge cannot land back on the same zero)
JITTER_FACTOR = 0.37


class SpectraError(ValueError):
    """Raised when counting or refinement cannot be trusted."""


@dataclass(frozen=True)
class Resonance:
    """A located determinant zero.

    ``character`` names the vanishing factor ("unreduced" without
    symmetry reduction), ``order`` is the verification-contour count,
    and ``newton_residual`` the determinant magnitude at the final
    iterate.
    """

    location: complex
    character: str
    order: int
    newton_residual: float


def _rect(rectangle):
    re_lo, re_hi, im_lo, im_hi = map(float, rectangle)
    if not (re_lo < re_hi and im_lo < im_hi):
        raise SpectraError("degenerate rectangle %r" % (rectangle,))
    return re_lo, re_hi, im_lo, im_hi


def _edge_nodes(a, b, density):
    n = max(MIN_EDGE_POINTS, int(math.ceil(abs(b - a) * density)))
    return [a + (b - a) * (j / n) for j in range(n)]


def _winding(evaluator, nodes):
    """Trapezoid value of (1/2 pi i) closed-sum f dz for f = D'/D."""
    f = []
    for lam in nodes:
        jet = evaluator(lam)
        if abs(jet.value) == 0.0 or \
                abs(jet.value) < BOUNDARY_ZERO_TOL * abs(jet.d_lambda):
            raise SpectraError("boundary too close to a zero near %s" % lam)
        f.append(jet.d_lambda / jet.value)
    total = 0j
    for j in range(len(nodes)):
        k = (j + 1) % len(nodes)
        total += 0.5 * (f[j] + f[k]) * (nodes[k] - nodes[j])
    return total / (2j * math.pi)


def count_zeros(evaluator, rectangle, density=CONTOUR_DENSITY):
    """Number of zeros (with multiplicity) inside an axis rectangle.

    The winding must come out near an integer; a larger deviation means
    a zero is sitting close to the boundary, and the caller should
    re-pose the rectangle (scan_rectangle jitters automatically).
    """
    re_lo, re_hi, im_lo, im_hi = _rect(rectangle)
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi)]
    nodes = []
    for j in range(4):
        nodes.extend(_edge_nodes(corners[j], corners[(j + 1) % 4], density))
    w = _winding(evaluator, nodes)
    count = round(w.real)
    if abs(w - count) > WINDING_TOL:
        raise SpectraError("boundary too close to a zero: winding %.4g%+.4gi"
                           % (w.real, w.imag))
    if count < 0:
        raise SpectraError("negative winding %d: evaluator is not "
                           "holomorphic inside" % count)
    return count


def _circle_count(evaluator, center, radius, points=256):
    nodes = [center + radius * cmath.exp(2j * math.pi * j / points)
             for j in range(points)]
    w = _winding(evaluator, nodes)
    count = round(w.real)
    if abs(w - count) > WINDING_TOL:
        raise SpectraError("verification contour at %s touches a zero"
                           % center)
    return count


def newton(evaluator, guess, character="unreduced", verify_radius=1e-3):
    """Refine a guess to a Resonance; the order comes from a small
    verification circle around the converged point."""
    lam = complex(guess)
    trace = []
    for _ in range(NEWTON_MAX_ITER):
        jet = evaluator(lam)
        if jet.d_lambda == 0:
            raise SpectraError("vanishing derivative at %s" % lam)
        step = jet.value / jet.d_lambda
        trace.append("%s  step %.3e" % (lam, abs(step)))
        lam -= step
        if abs(step) < NEWTON_STEP_TOL * max(1.0, abs(lam)):
            break
    else:
        raise SpectraError("no convergence after %d iterations:\n%s"
                           % (NEWTON_MAX_ITER, "\n".join(trace)))
    residual = abs(evaluator(lam).value)
    order = 0
    radius = verify_radius
    for _ in range(3):
        try:
            order = _circle_count(evaluator, lam, radius)
            break
        except SpectraError:
            # another zero almost on the circle; resizing by an odd
            # factor moves the contour off it
            radius *= 1.37
    else:
        raise SpectraError("verification contour failed at %s" % lam)
    if order < 1:
        raise SpectraError("Newton limit %s is not inside its own "
                           "verification contour" % lam)
    return Resonance(location=lam, character=character, order=order,
                     newton_residual=residual)


def _count_with_jitter(evaluator, rectangle, cell, density):
    """Count zeros, growing the rectangle outward when a zero fouls the
    boundary.  Growing (rather than translating) can only add zeros, so
    no zero of the original rectangle is ever lost."""
    re_lo, re_hi, im_lo, im_hi = rectangle
    pad = 0.0
    for attempt in range(4):
        box = (re_lo - pad, re_hi + pad, im_lo - pad, im_hi + pad)
        try:
            return count_zeros(evaluator, box, density), box
        except SpectraError:
            if attempt == 3:
                raise
            pad += JITTER_FACTOR * cell
    raise AssertionError("unreachable")


def _scan_factor(evaluator, rectangle, cell, character, density):
    found = []
    stack = [rectangle]
    while stack:
        box = stack.pop()
        count, counted_box = _count_with_jitter(evaluator, box, cell,
                                                density)
        if count == 0:
            continue
        re_lo, re_hi, im_lo, im_hi = counted_box
        if max(re_hi - re_lo, im_hi - im_lo) > cell:
            rm, im = 0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)
            stack.extend([(re_lo, rm, im_lo, im), (rm, re_hi, im_lo, im),
                          (re_lo, rm, im, im_hi), (rm, re_hi, im, im_hi)])
            continue
        guess = complex(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi))
        found.append(newton(evaluator, guess, character=character))
    return found


def scan_rectangle(cache, rectangle, cell=0.1, characters=None,
                   density=CONTOUR_DENSITY):
    """Locate every determinant zero in a rectangle.

    With a nontrivial symmetry group each character factor is scanned
    separately (``characters`` restricts which); otherwise the single
    unreduced determinant is used.  Results are deduplicated per factor
    and sorted by (Re, Im, character).
    """
    if cell <= 0:
        raise SpectraError("cell size must be positive")
    rect = _rect(rectangle)
    if cache.group.size > 1:
        selected = characters or [ch.label for ch in
                                  cache.group.characters]
        by_label = {ch.label: ch for ch in cache.group.characters}
        unknown = [lab for lab in selected if lab not in by_label]
        if unknown:
            raise SpectraError("unknown characters %r" % (unknown,))
        factors = [(lab, by_label[lab]) for lab in selected]
    else:
        factors = [("unreduced", None)]

    results = []
    for label, chi in factors:
        ev = lambda lam, _c=chi: cycle.determinant(cache, lam, chi=_c)
        hits = _scan_factor(ev, rect, cell, label, density)
        kept = []
        for res in sorted(hits, key=lambda r: (r.location.real,
                                               r.location.imag)):
            loc = res.location
            if not (rect[0] - DEDUPE_TOL <= loc.real <= rect[1] + DEDUPE_TOL
                    and rect[2] - DEDUPE_TOL <= loc.imag
                    <= rect[3] + DEDUPE_TOL):
                continue   # jitter-grown box picked up an outsider
            if kept and abs(kept[-1].location - loc) < DEDUPE_TOL:
                continue
            kept.append(res)
        results.extend(kept)
    results.sort(key=lambda r: (r.location.real, r.location.imag,
                                r.character))
    return results


def choose_truncation(surface, group, rectangle, weight=None, tol=1e-9,
                      start=4, cap=12):
    """Smallest cache whose tail estimate meets tol at the rectangle's
    corners, erring toward over-computation.

    The tail proxy is relative_error at the final order for every
    factor at all four corners; the returned cache is ready for
    scan_rectangle.
    """
    re_lo, re_hi, im_lo, im_hi = _rect(rectangle)
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi)]
    if weight is None:
        from .weights import WeightSpec
        weight = WeightSpec(kind="constant")
    last = None
    for n in range(start, cap + 1):
        cache = cycle.build_cache(surface, group, n, weight)
        worst = 0.0
        chis = (cache.group.characters if cache.group.size > 1
                else (None,))
        for corner in corners:
            for chi in chis:
                ser = cycle.evaluate_series(cache, corner, chi=chi)
                worst = max(worst, cycle.relative_error(ser, n))
        if worst <= tol:
            return cache
        last = (cache, worst)
    cache, worst = last
    raise SpectraError("relative error %.3g > %.3g at truncation %d; "
                       "rectangle may be too deep" % (worst, tol, cap))
