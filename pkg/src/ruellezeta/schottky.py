"""Schottky surfaces: generators, fundamental discs and symbolic words.

A rank r surface carries 2r generator slots g_0 .. g_{2r-1} with
g_{i+r} = g_i^{-1} (indices mod 2r).  Words are tuples of letter
indices; the word (i_1, .., i_n) denotes the composition
g_{i_n} ... g_{i_1}, i.e. the first letter acts first.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .moebius import (
    FixedPointPair,
    MoebiusError,
    MoebiusMap,
    classify,
    displacement_length,
    fixed_points,
    proportional,
)

#: allowed deviation when checking g_i(boundary of D_i) = boundary of D_{i+r}
BOUNDARY_MAP_TOL = 1e-8
_BOUNDARY_SAMPLES = 16


class SchottkyError(ValueError):
    """Raised when surface data fails validation."""


class Disc(NamedTuple):
    center: float
    radius: float


class Interval(NamedTuple):
    lo: float
    hi: float

    def contains(self, x, slack=0.0):
        return self.lo - slack <= x <= self.hi + slack


@dataclass(frozen=True)
class SchottkySurface:
    kind: str
    rank: int
    generators: tuple          # 2r MoebiusMap entries
    discs: tuple               # 2r Disc entries, one per generator slot
    intervals: tuple           # boundary intervals below the discs
    params: dict

    @property
    def n_letters(self):
        return 2 * self.rank

    def inverse_letter(self, i):
        return (i + self.rank) % (2 * self.rank)

    def describe(self):
        items = ", ".join("%s=%.12g" % kv for kv in sorted(self.params.items()))
        return "%s(%s)" % (self.kind, items)


def _isometric_disc(g):
    if g.c == 0.0:
        raise SchottkyError(
            "generator fixes infinity; conjugate the group so every "
            "isometric circle is finite"
        )
    return Disc(center=-g.d / g.c, radius=1.0 / abs(g.c))


def _surface_from_generators(kind, rank, gens, params):
    gens = tuple(gens)
    discs = tuple(_isometric_disc(g) for g in gens)
    intervals = tuple(Interval(d.center - d.radius, d.center + d.radius) for d in discs)
    surface = SchottkySurface(
        kind=kind, rank=rank, generators=gens, discs=discs,
        intervals=intervals, params=dict(params),
    )
    validate_surface(surface)
    return surface


def build_three_funnel(l1, l2, l3):
    """Hyperbolic surface with three funnel ends of the given widths."""
    for name, l in (("l1", l1), ("l2", l2), ("l3", l3)):
        if not (isinstance(l, (int, float)) and math.isfinite(l) and l > 0):
            raise SchottkyError("funnel width %s must be positive, got %r" % (name, l))
    c1, s1 = math.cosh(l1 / 2.0), math.sinh(l1 / 2.0)
    c2, s2 = math.cosh(l2 / 2.0), math.sinh(l2 / 2.0)
    c3 = math.cosh(l3 / 2.0)
    # trace of g1 g2^{-1} is linear in a + 1/a, so the condition
    # tr(g1 g2^{-1}) = -2 cosh(l3/2) pins a + 1/a exactly
    k = 2.0 * (c1 * c2 + c3) / (s1 * s2)
    if k <= 2.0:
        raise SchottkyError("no real a > 1 solves the trace condition")
    a = 0.5 * (k + math.sqrt(k * k - 4.0))
    g1 = MoebiusMap.with_unit_det(c1, s1, s1, c1)
    g2 = MoebiusMap.with_unit_det(c2, a * s2, s2 / a, c2)
    got = (g1 @ g2.inverse()).trace()
    want = -2.0 * c3
    if abs(got - want) > 1e-9 * max(1.0, abs(want)):
        raise SchottkyError("trace condition violated: %.17g vs %.17g" % (got, want))
    return _surface_from_generators(
        "three_funnel", 2, (g1, g2, g1.inverse(), g2.inverse()),
        {"l1": float(l1), "l2": float(l2), "l3": float(l3), "a": a},
    )


def build_funneled_torus(l1, l2, phi):
    """Genus one surface with one funnel, from lengths l1, l2 and angle phi."""
    for name, v in (("l1", l1), ("l2", l2)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise SchottkyError("length %s must be positive, got %r" % (name, v))
    if not (0.0 < phi < math.pi):
        raise SchottkyError("angle phi must lie in (0, pi), got %r" % (phi,))
    e1 = math.exp(l1 / 2.0)
    g1 = MoebiusMap.with_unit_det(e1, 0.0, 0.0, 1.0 / e1)
    c2, s2 = math.cosh(l2 / 2.0), math.sinh(l2 / 2.0)
    cp, sp = math.cos(phi), math.sin(phi)
    g2 = MoebiusMap.with_unit_det(c2 - cp * s2, sp * sp * s2, s2, c2 + cp * s2)
    # rotate so that no fundamental disc touches infinity
    t = math.pi / 8.0
    rot = MoebiusMap.with_unit_det(math.cos(t), math.sin(t), -math.sin(t), math.cos(t))
    g1t = rot.inverse() @ g1 @ rot
    g2t = rot.inverse() @ g2 @ rot
    return _surface_from_generators(
        "funneled_torus", 2, (g1t, g2t, g1t.inverse(), g2t.inverse()),
        {"l1": float(l1), "l2": float(l2), "phi": float(phi)},
    )


def validate_surface(surface):
    """Check the disc dynamics that make the group a Schottky group."""
    n = surface.n_letters
    if len(surface.generators) != n or len(surface.discs) != n:
        raise SchottkyError("expected %d generators and discs" % n)
    for i, g in enumerate(surface.generators):
        if classify(g) != "hyperbolic":
            raise SchottkyError("generator %d is not hyperbolic" % i)
        if not proportional(surface.generators[surface.inverse_letter(i)], g.inverse(), 1e-10):
            raise SchottkyError("slot %d does not hold the inverse of slot %d"
                                % (surface.inverse_letter(i), i))
    for i in range(n):
        for j in range(i + 1, n):
            di, dj = surface.discs[i], surface.discs[j]
            if abs(di.center - dj.center) <= di.radius + dj.radius:
                raise SchottkyError(
                    "fundamental discs %d and %d are not disjoint" % (i, j))
    for i, g in enumerate(surface.generators):
        disc = surface.discs[i]
        target = surface.discs[surface.inverse_letter(i)]
        for k in range(_BOUNDARY_SAMPLES):
            t = 2.0 * math.pi * (k + 0.5) / _BOUNDARY_SAMPLES
            z = complex(disc.center + disc.radius * math.cos(t),
                        disc.radius * math.sin(t))
            w = g.apply(z)
            err = abs(abs(w - target.center) - target.radius)
            if err > BOUNDARY_MAP_TOL:
                raise SchottkyError(
                    "generator %d maps its disc boundary off target (err %.3g)"
                    % (i, err))


# ---------------------------------------------------------------------------
# words

def is_reduced(word, rank):
    n = len(word)
    two_r = 2 * rank
    for j in range(n - 1):
        if word[j] == (word[j + 1] + rank) % two_r:
            return False
    return True


def is_closed(word, rank):
    if not word or not is_reduced(word, rank):
        return False
    return word[-1] != (word[0] + rank) % (2 * rank)


def adjacency_matrix(rank):
    """Transition matrix of reduced words; closed counts are its trace powers."""
    two_r = 2 * rank
    a = np.ones((two_r, two_r), dtype=np.int64)
    for j in range(two_r):
        a[(j + rank) % two_r, j] = 0
    return a


def count_closed_words(rank, n):
    return int(np.trace(np.linalg.matrix_power(adjacency_matrix(rank), n)))


def enumerate_closed_words(surface, n):
    """All cyclically reduced words of length n, in lexicographic order."""
    if n < 1:
        raise ValueError("word length must be >= 1")
    rank = surface.rank
    two_r = 2 * rank
    out = []
    word = [0] * n

    def rec(pos):
        prev = word[pos - 1] if pos > 0 else None
        for letter in range(two_r):
            if prev is not None and prev == (letter + rank) % two_r:
                continue
            word[pos] = letter
            if pos == n - 1:
                if word[-1] != (word[0] + rank) % two_r:
                    out.append(tuple(word))
            else:
                rec(pos + 1)

    rec(0)
    return out


class CyclicClass(NamedTuple):
    representative: tuple
    size: int          # number of distinct rotations, equal to the period
    primitive: bool


def cyclic_classes(surface, n):
    """Partition the closed words of length n into cyclic rotation classes."""
    seen = set()
    out = []
    for w in enumerate_closed_words(surface, n):
        if w in seen:
            continue
        rotations = {w[k:] + w[:k] for k in range(n)}
        seen |= rotations
        out.append(CyclicClass(
            representative=min(rotations),
            size=len(rotations),
            primitive=len(rotations) == n,
        ))
    return out


def primitive_root(word):
    """Shortest word u with word = u^k, and the multiplicity k."""
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[:p] * (n // p):
            return word[:p], n // p
    raise AssertionError("unreachable")


def word_to_map(surface, word):
    if not word:
        return MoebiusMap.identity()
    acc = surface.generators[word[0]]
    for letter in word[1:]:
        acc = surface.generators[letter] @ acc
    return acc


@dataclass(frozen=True)
class GeodesicData:
    word: tuple
    map: MoebiusMap
    length: float
    fixed: FixedPointPair
    cyclic_points: tuple    # FixedPointPair per rotation, rotation 0 first


def geodesic_data(surface, word):
    """Closed geodesic data for a cyclically reduced word.

    cyclic_points[j] holds the fixed points of the word rotated by j
    letters.  Each rotation is solved on its own map: pushing the base
    pair through the length-j prefix would be algebraically equivalent
    but amplifies rounding by the prefix derivative e^(prefix length),
    which destroys every digit already for six-letter words here.
    """
    word = tuple(word)
    if not is_closed(word, surface.rank):
        raise SchottkyError("word %r is not cyclically reduced" % (word,))
    m = word_to_map(surface, word)
    try:
        length = displacement_length(m)
        fixed = fixed_points(m)
    except MoebiusError as exc:
        raise SchottkyError("word %r is not hyperbolic: %s" % (word, exc)) from exc
    pairs = [fixed]
    for j in range(1, len(word)):
        rot = word[j:] + word[:j]
        try:
            pairs.append(fixed_points(word_to_map(surface, rot)))
        except MoebiusError as exc:
            raise SchottkyError("rotation %r is not hyperbolic: %s"
                                % (rot, exc)) from exc
    _check_interval_placement(surface, word, fixed)
    return GeodesicData(word=tuple(word), map=m, length=length,
                        fixed=fixed, cyclic_points=tuple(pairs))


def _check_interval_placement(surface, word, fixed):
    # attracting point lies below the last letter's target disc, repelling
    # below the first letter's own disc
    slack = 1e-9
    i_att = surface.inverse_letter(word[-1])
    i_rep = word[0]
    if not surface.intervals[i_att].contains(fixed.attracting, slack):
        raise SchottkyError("attracting point of %r escapes interval %d"
                            % (word, i_att))
    if not surface.intervals[i_rep].contains(fixed.repelling, slack):
        raise SchottkyError("repelling point of %r escapes interval %d"
                            % (word, i_rep))
