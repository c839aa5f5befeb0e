"""Period integrals of test weights along closed geodesics.

Three weight families are supported: the constant weight (the integral
is just the primitive geodesic length), a Gaussian bump on the surface
pulled back to the geodesic, and a Gaussian on the Poincare section in
the boundary-pair coordinates (x_minus, x_plus).

The Gaussian integrals collapse to finite sums over per-word geometric
data, one term per cyclic rotation: the rotation's repelling/attracting
fixed-point pair, used directly for the section family and as an axis
anchor map for the base family.  (Anchoring at the rotated word's own
fixed points equals anchoring at the base word and composing with the
prefix map, up to a real diagonal factor that cancels in the integrand;
unlike accumulated prefix products it keeps every matrix entry at unit
scale, which is what makes the near-axis terms well conditioned.)  That
data is target independent and gets precomputed once per word.  The
symmetrized variants enumerate all group translates of the word in
sorted order, so evaluating g.w and w performs the exact same float
additions and G-invariance holds bit for bit.
"""

import math
from dataclasses import dataclass

from .moebius import MoebiusMap, boundary_distance, displacement_length
from .schottky import geodesic_data, primitive_root, word_to_map

WEIGHT_KINDS = ("constant", "gauss_base", "gauss_section")
BOUNDARY_METRICS = ("cayley_angular", "euclidean")

_ROOT_PI = math.sqrt(math.pi)


class WeightError(ValueError):
    """Raised for invalid weight specifications or targets."""


@dataclass(frozen=True)
class WeightSpec:
    """Declarative description of one test weight.

    ``target`` is the default evaluation point: a complex upper
    half-plane center for gauss_base, an (x_minus, x_plus) boundary pair
    for gauss_section.  Grid evaluators override it per point, so it may
    be left as None here.
    """

    kind: str
    sigma: float = 1.0
    target: object = None
    symmetrize: bool = False
    boundary_metric: str = "cayley_angular"

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise WeightError("unknown weight kind: %r" % (self.kind,))
        if not self.sigma > 0.0:
            raise WeightError("sigma must be positive")
        if self.boundary_metric not in BOUNDARY_METRICS:
            raise WeightError("unknown boundary metric: %r"
                              % (self.boundary_metric,))
        if self.target is not None:
            if self.kind == "gauss_base":
                if complex(self.target).imag <= 0.0:
                    raise WeightError(
                        "gauss_base target must lie in the upper half-plane")
            elif self.kind == "gauss_section":
                if len(self.target) != 2:
                    raise WeightError(
                        "gauss_section target is an (x_minus, x_plus) pair")


@dataclass(frozen=True)
class WordGeometry:
    """Target-independent integral data for one closed word.

    ``maps`` holds the axis anchor map of every cyclic rotation of every
    translate (gauss_base), ``pairs`` the same rotations' (repelling,
    attracting) boundary pairs (gauss_section).  Exactly one of the two
    is populated for the Gaussian kinds; the constant weight needs
    neither.
    """

    kind: str
    word: tuple
    maps: tuple = ()
    pairs: tuple = ()
    n_translates: int = 1


def _anchor_map(x_minus, x_plus):
    # z -> (z - x_minus)/(z - x_plus); the determinant sign is irrelevant
    # because only x/y enters the integrand and that is invariant under
    # rescalings of the anchored coordinate
    if math.isinf(x_minus) or math.isinf(x_plus):
        raise WeightError("axis endpoint at infinity is not supported")
    return MoebiusMap(1.0, -x_minus, 1.0, -x_plus)


def _class_rep(word):
    return min(word[k:] + word[:k] for k in range(len(word)))


def _translate_words(group, word, symmetrize):
    # Anchoring at the class representative makes the integral an exact
    # class function: different rotations unroll the geodesic against
    # different fundamental-domain translates, which agrees only up to
    # the (sigma-dependent) dropped tail otherwise.
    if symmetrize and group is not None and group.size > 1:
        return sorted(_class_rep(group.act_word(g, word))
                      for g in range(group.size))
    return [_class_rep(tuple(word))]


def precompute_geometry(surface, group, word, spec):
    """Build the WordGeometry for one closed word under the given spec."""
    word = tuple(word)
    words = _translate_words(group, word, spec.symmetrize)
    if spec.kind == "constant":
        return WordGeometry(kind=spec.kind, word=word,
                            n_translates=len(words))
    if spec.kind == "gauss_base":
        maps = []
        for tw in words:
            data = geodesic_data(surface, tw)
            for pair in data.cyclic_points:
                maps.append(_anchor_map(pair.repelling, pair.attracting))
        return WordGeometry(kind=spec.kind, word=word, maps=tuple(maps),
                            n_translates=len(words))
    pairs = []
    for tw in words:
        # geodesic_data carries the rotated pairs via the prefix
        # conjugation identity, no per-rotation fixed point solve
        data = geodesic_data(surface, tw)
        for pair in data.cyclic_points:
            pairs.append((pair.repelling, pair.attracting))
    return WordGeometry(kind=spec.kind, word=word, pairs=tuple(pairs),
                        n_translates=len(words))


def base_period_integral(geometry, center, sigma):
    """Gaussian base weight integrated along the geodesic of the word.

    The summand arithmetic mirrors kernels.base_sums term for term so
    that scalar and grid evaluations agree to rounding.
    """
    if geometry.kind != "gauss_base":
        raise WeightError("geometry was built for %r" % (geometry.kind,))
    center = complex(center)
    if center.imag <= 0.0:
        raise WeightError("center must lie in the upper half-plane")
    zx, zy = center.real, center.imag
    inv_sigma = 1.0 / sigma
    total = 0.0
    for m in geometry.maps:
        # x/y of the anchored image; the |cz + d|^2 shared by both parts
        # is cancelled before any division happens
        na = m.a * zx + m.b
        nb = m.a * zy
        da = m.c * zx + m.d
        db = m.c * zy
        ratio = (na * da + nb * db) / (zy * m.det) * inv_sigma
        total += math.exp(-(ratio * ratio))
    return total / (_ROOT_PI * sigma * geometry.n_translates)


def section_period_integral(geometry, target, sigma,
                            metric="cayley_angular"):
    """Poincare-section Gaussian integrated along the word's orbit.

    ``target`` is the (x_minus, x_plus) coordinate of the section point;
    each cyclic rotation contributes one two-dimensional Gaussian term
    centered at its fixed-point pair.
    """
    if geometry.kind != "gauss_section":
        raise WeightError("geometry was built for %r" % (geometry.kind,))
    x_minus, x_plus = target
    inv_sigma2 = 1.0 / (sigma * sigma)
    total = 0.0
    for rep, att in geometry.pairs:
        dm = boundary_distance(x_minus, rep, metric)
        dp = boundary_distance(x_plus, att, metric)
        total += math.exp(-(dm * dm + dp * dp) * inv_sigma2)
    return total / (math.pi * sigma * sigma * geometry.n_translates)


def constant_period_integral(surface, word):
    """Primitive length of the geodesic the word winds around.

    A word that is the k-th power of a shorter one still integrates the
    constant weight over the primitive geodesic once; iterate counting is
    the caller's business.
    """
    root, _ = primitive_root(tuple(word))
    return displacement_length(word_to_map(surface, root))


def period_integral(surface, geometry, spec, target):
    """Dispatch on the weight kind; target may be None for constant."""
    if spec.kind == "constant":
        return constant_period_integral(surface, geometry.word)
    if target is None:
        target = spec.target
    if target is None:
        raise WeightError("weight of kind %r needs a target" % (spec.kind,))
    if spec.kind == "gauss_base":
        return base_period_integral(geometry, target, spec.sigma)
    return section_period_integral(geometry, target, spec.sigma,
                                   spec.boundary_metric)
