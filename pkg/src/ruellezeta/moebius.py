"""Real Moebius maps on the upper half plane and its boundary circle.

All maps are kept as 2x2 real matrices normalized to |det| = 1.
Orientation reversing matrices (det = -1) are allowed; they occur as
reflection symmetries and twisted compositions, never as group
generators of a surface.
"""

import math
from typing import NamedTuple

INFINITY = math.inf

#: tolerance on |det| - 1 after normalization
NORM_TOL = 1e-12
#: scaled residual allowed for |g(x) - x| at a reported fixed point
FIXED_POINT_TOL = 1e-10
#: |tr| - 2 band classified as parabolic
TRACE_TOL = 1e-12

# Entries above this are rescaled before computing the determinant so the
# product a*d - b*c cannot overflow.  Rescaling by a positive factor does
# not change the projective map, so this is invisible to callers.
_RESCALE_AT = 1e150

_HUGE_ARG = 1e130


class MoebiusError(ValueError):
    """Raised for maps that violate a geometric precondition."""


class MoebiusMap:
    """Map z -> (a z + b) / (c z + d) with real coefficients."""

    __slots__ = ("a", "b", "c", "d", "det")

    def __init__(self, a, b, c, d):
        a, b, c, d = float(a), float(b), float(c), float(d)
        m = max(abs(a), abs(b), abs(c), abs(d))
        if not math.isfinite(m) or m == 0.0:
            raise MoebiusError("matrix entries must be finite and not all zero")
        if m > _RESCALE_AT:
            a, b, c, d = a / m, b / m, c / m, d / m
        det = a * d - b * c
        if det == 0.0 or not math.isfinite(det):
            raise MoebiusError("matrix is singular")
        s = math.sqrt(abs(det))
        self.a = a / s
        self.b = b / s
        self.c = c / s
        self.d = d / s
        self.det = 1.0 if det > 0.0 else -1.0

    @staticmethod
    def identity():
        return MoebiusMap(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def with_unit_det(a, b, c, d, det=1.0):
        """Build from entries whose determinant is exactly +-1 by construction.

        The regular constructor divides entries by the square root of the
        computed determinant.  When the true determinant is +-1 that division
        is pure damage: for entries of size M the product a d - b c cancels
        down from M^2, so it carries absolute noise of order M^2 eps, and the
        division spreads that noise into every entry, hence into traces and
        translation lengths.  Callers that know the determinant state it.
        """
        if det not in (1.0, -1.0):
            raise MoebiusError("asserted determinant must be +1 or -1")
        a, b, c, d = float(a), float(b), float(c), float(d)
        computed = a * d - b * c
        if not math.isfinite(computed):
            raise MoebiusError("matrix entries must be finite")
        # misuse guard; the tolerance only needs to sit above the
        # cancellation noise of the computed determinant
        if abs(computed - det) > 1e-9 * (1.0 + abs(a * d) + abs(b * c)):
            raise MoebiusError("determinant %r is not the asserted %g"
                               % (computed, det))
        out = object.__new__(MoebiusMap)
        out.a, out.b, out.c, out.d = a, b, c, d
        out.det = det
        return out

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def trace(self):
        """Trace of the normalized matrix; only |trace| is well defined."""
        return self.a + self.d

    def __matmul__(self, other):
        """Matrix product; ``(f @ g)(z) == f(g(z))``.

        Factors are already normalized, so the product has |det| = 1 up to
        rounding and is taken as is.  Renormalizing against the computed
        determinant would be wrong here: for large entries the determinant
        is a catastrophic cancellation and its noise would pollute every
        entry.
        """
        out = object.__new__(MoebiusMap)
        out.a = self.a * other.a + self.b * other.c
        out.b = self.a * other.b + self.b * other.d
        out.c = self.c * other.a + self.d * other.c
        out.d = self.c * other.b + self.d * other.d
        out.det = self.det * other.det
        if not (math.isfinite(out.a) and math.isfinite(out.b)
                and math.isfinite(out.c) and math.isfinite(out.d)):
            raise MoebiusError("matrix product overflowed")
        return out

    def inverse(self):
        # the adjugate realizes the inverse map projectively, for det = -1 too
        out = object.__new__(MoebiusMap)
        out.a, out.b, out.c, out.d = self.d, -self.b, -self.c, self.a
        out.det = self.det
        return out

    def apply(self, z):
        """Evaluate at a complex point (not the pole)."""
        den = self.c * z + self.d
        if den == 0:
            raise MoebiusError("evaluation at the pole of the map")
        return (self.a * z + self.b) / den

    def apply_boundary(self, x):
        """Evaluate at a point of the boundary circle R united with infinity."""
        if math.isinf(x):
            if self.c == 0.0:
                return INFINITY
            return self.a / self.c
        if abs(x) > _HUGE_ARG:
            # evaluate in the 1/x chart to dodge float overflow
            num = self.a + self.b / x
            den = self.c + self.d / x
        else:
            num = self.a * x + self.b
            den = self.c * x + self.d
        if den == 0.0:
            return INFINITY
        v = num / den
        return v if math.isfinite(v) else INFINITY

    def derivative(self, z):
        """Complex derivative det / (c z + d)^2 at a finite point."""
        den = self.c * z + self.d
        if den == 0:
            raise MoebiusError("derivative at the pole of the map")
        return self.det / (den * den)

    def boundary_derivative(self, x):
        """Derivative at a boundary point, using the 1/x chart at infinity."""
        if math.isinf(x):
            if self.a == 0.0:
                raise MoebiusError("derivative undefined: map sends infinity to 0 pole chart")
            return self.det / (self.a * self.a)
        return self.derivative(complex(x, 0.0)).real

    def __repr__(self):
        return "MoebiusMap(%.6g, %.6g, %.6g, %.6g)" % self.entries()


class FixedPointPair(NamedTuple):
    repelling: float
    attracting: float


def proportional(m1, m2, tol=1e-10):
    """True if two normalized maps agree up to the overall sign."""
    same = max(abs(m1.a - m2.a), abs(m1.b - m2.b), abs(m1.c - m2.c), abs(m1.d - m2.d))
    flip = max(abs(m1.a + m2.a), abs(m1.b + m2.b), abs(m1.c + m2.c), abs(m1.d + m2.d))
    return min(same, flip) <= tol


def is_identity(m, tol=1e-10):
    return proportional(m, MoebiusMap.identity(), tol)


def classify(m):
    """'hyperbolic', 'parabolic' or 'elliptic' for a det = +1 map."""
    if m.det < 0:
        raise MoebiusError("classification requires det = +1")
    if is_identity(m):
        raise MoebiusError("classification undefined for the identity")
    t = abs(m.trace())
    if t > 2.0 + TRACE_TOL:
        return "hyperbolic"
    if t >= 2.0 - TRACE_TOL:
        return "parabolic"
    return "elliptic"


def displacement_length(m):
    """Translation length 2 arccosh(|tr|/2) of a hyperbolic map."""
    if classify(m) != "hyperbolic":
        raise MoebiusError("displacement length requires a hyperbolic map")
    return 2.0 * math.acosh(abs(m.trace()) / 2.0)


def _stable_roots(c, lin, const):
    """Real roots of c x^2 + lin x + const = 0, c != 0, positive discriminant."""
    disc = lin * lin - 4.0 * c * const
    r = math.sqrt(disc)
    if lin >= 0.0:
        q = -0.5 * (lin + r)
    else:
        q = -0.5 * (lin - r)
    x1 = q / c
    x2 = const / q if q != 0.0 else -lin / c - x1
    return x1, x2


def _fixed_point_candidates(m):
    """Both fixed points with signed multipliers, attracting first.

    The multipliers are det/(c x + d)^2 and the two denominators multiply
    to det exactly.  Evaluating c x + d directly at the repelling point of
    a long word cancels to noise, so only the large denominator is formed
    that way and the small one is recovered from the product.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    tr = a + d
    disc = tr * tr - 4.0 * m.det
    if disc <= TRACE_TOL * max(tr * tr, 1.0):
        raise MoebiusError("map has no boundary fixed point pair")
    if c == 0.0:
        # one fixed point sits at infinity; |d - a| = sqrt(disc) > 0 here
        candidates = [(b / (d - a), m.det / (d * d)),
                      (INFINITY, m.det / (a * a))]
    else:
        # roots of c x^2 + (d - a) x - b = 0
        x1, x2 = _stable_roots(c, d - a, -b)
        den1, den2 = c * x1 + d, c * x2 + d
        if abs(den1) < abs(den2):
            x1, x2, den1 = x2, x1, den2
        den2 = m.det / den1
        candidates = [(x1, m.det / (den1 * den1)),
                      (x2, m.det / (den2 * den2))]
    if abs(candidates[0][1]) > abs(candidates[1][1]):
        candidates.reverse()
    return candidates


def fixed_points(m):
    """Repelling and attracting boundary fixed points of a loxodromic map.

    Works for det = +1 hyperbolic maps and for det = -1 maps whose square
    is hyperbolic.  The two points satisfy |g'| > 1 and |g'| < 1
    respectively; anything on the unit derivative border is rejected.
    """
    (xa, mua), (xb, mub) = _fixed_point_candidates(m)
    if not abs(mua) < 1.0 - TRACE_TOL or not abs(mub) > 1.0 + TRACE_TOL:
        raise MoebiusError("fixed points are not attracting/repelling")
    # Backward error of the defining quadratic.  The forward residual
    # |g(x) - x| is useless here: at the repelling point it gets amplified
    # by g' - 1, which is e^len for a word of geodesic length len.
    a, b, c, d = m.a, m.b, m.c, m.d
    for x in (xa, xb):
        if not math.isinf(x):
            res = abs(c * x * x + (d - a) * x - b)
            scale = abs(c) * x * x + abs(d - a) * abs(x) + abs(b)
            if res > FIXED_POINT_TOL * (scale + 1.0):
                raise MoebiusError("fixed point residual too large: %.3g" % res)
    return FixedPointPair(repelling=xb, attracting=xa)


def multipliers(m):
    """Signed derivatives at (repelling, attracting), stably evaluated.

    Calling boundary_derivative at a repelling fixed point loses half the
    mantissa to cancellation once displacement lengths get large; this
    recovers both values to full relative accuracy.
    """
    (xa, mua), (xb, mub) = _fixed_point_candidates(m)
    del xa, xb
    return mub, mua


def boundary_angle(x):
    """Angle of the Cayley image (x - i)/(x + i) on the unit circle.

    Infinity maps to angle 0; the map is a bijection of the boundary
    circle onto [-pi, pi).
    """
    if math.isinf(x):
        return 0.0
    return math.atan2(-2.0 * x, x * x - 1.0)


def boundary_distance(x, y, metric="cayley_angular"):
    """Distance of two boundary points.

    ``cayley_angular`` is the angle between the Cayley images, exactly
    invariant under the rotation subgroup.  ``euclidean`` is the plain
    distance on R, provided for plotting comparisons; infinity is at
    infinite distance from every finite point there.
    """
    if metric == "cayley_angular":
        d = abs(boundary_angle(x) - boundary_angle(y))
        return d if d <= math.pi else 2.0 * math.pi - d
    if metric == "euclidean":
        if math.isinf(x) and math.isinf(y):
            return 0.0
        return abs(x - y)
    raise ValueError("unknown boundary metric: %r" % (metric,))
