"""Finite symmetry groups of Schottky generating sets.

A symmetry group is a finite set of Moebius maps permuting the
fundamental discs such that conjugation permutes the letter maps among
each other.  Group elements twist the closing condition of words, and
the twisted words organize into orbits under cyclic shifts and group
translation.  One representative per prime orbit is all the
character-decomposed determinants ever need, which is where the whole
speedup comes from.

The letter action of a candidate element is derived from matrix
conjugation rather than hard-coded per surface family: which generator
plays which role under a reflection depends on the concrete matrices,
and the two families disagree about it.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from .moebius import MoebiusMap, MoebiusError, fixed_points, proportional
from .schottky import word_to_map

DEF_RELATION_TOL = 1e-8

_DISC_SAMPLES = 8
_PARAM_TOL = 1e-12


class SymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class GroupElement:
    index: int
    name: str
    map: MoebiusMap
    action: tuple
    order: int


@dataclass(frozen=True)
class Character:
    label: str
    dimension: int
    values: tuple


@dataclass(frozen=True)
class SymmetryGroup:
    """Immutable group data: elements, multiplication table, characters.

    ``elements[0]`` is always the identity.  Twists are referred to by
    element index throughout.
    """

    rank: int
    elements: tuple
    table: tuple
    inverses: tuple
    characters: tuple

    @property
    def size(self):
        return len(self.elements)

    @property
    def identity(self):
        return self.elements[0]

    def multiply(self, i, j):
        return self.table[i][j]

    def power(self, i, k):
        out = 0
        for _ in range(k % self.elements[i].order):
            out = self.table[out][i]
        return out

    def act_letter(self, g, letter):
        return self.elements[g].action[letter]

    def act_word(self, g, word):
        action = self.elements[g].action
        return tuple(action[i] for i in word)


def _entry_scale(m):
    return max(abs(m.a), abs(m.b), abs(m.c), abs(m.d))


def _letter_action(surface, m):
    """Permutation i -> j with m g_i m^(-1) = +-g_j, or None.

    None signals that conjugation by m does not preserve the generating
    set, i.e. m is not a symmetry of this representation.
    """
    gens = surface.generators
    mi = m.inverse()
    action = []
    for g in gens:
        conj = (m @ g) @ mi
        tol = 1e-9 * (1.0 + _entry_scale(g))
        img = None
        for j, h in enumerate(gens):
            if proportional(conj, h, tol):
                img = j
                break
        if img is None:
            return None
        action.append(img)
    if sorted(action) != list(range(len(gens))):
        return None
    return tuple(action)


def _multiplication_table(maps):
    n = len(maps)
    table = []
    for i in range(n):
        row = []
        for j in range(n):
            prod = maps[i] @ maps[j]
            tol = 1e-9 * (1.0 + _entry_scale(prod))
            k = next((k for k in range(n)
                      if proportional(prod, maps[k], tol)), None)
            if k is None:
                raise SymmetryError("candidate set is not closed under products")
            row.append(k)
        table.append(tuple(row))
    return tuple(table)


def _element_order(table, i):
    k, cur = 1, i
    while cur != 0:
        cur = table[cur][i]
        k += 1
        if k > len(table):
            raise SymmetryError("element %d generates outside the table" % i)
    return k


_CHARACTER_DATA = {
    1: (("A", (1.0,)),),
    2: (("A", (1.0, 1.0)),
        ("B", (1.0, -1.0))),
    4: (("A", (1.0, 1.0, 1.0, 1.0)),
        ("B", (1.0, -1.0, 1.0, -1.0)),
        ("C", (1.0, 1.0, -1.0, -1.0)),
        ("D", (1.0, -1.0, -1.0, 1.0))),
}


def _check_characters(group):
    chars = group.characters
    size = group.size
    if sum(c.dimension ** 2 for c in chars) != size:
        raise SymmetryError("character dimensions do not sum to |G|")
    for c in chars:
        if c.values[0] != c.dimension:
            raise SymmetryError("character %s wrong at the identity" % c.label)
    for i, ci in enumerate(chars):
        for j, cj in enumerate(chars):
            dot = sum(u * v for u, v in zip(ci.values, cj.values))
            if abs(dot - size * (i == j)) > 1e-12:
                raise SymmetryError("characters %s, %s not orthogonal"
                                    % (ci.label, cj.label))


def validate_group(surface, group, tol=DEF_RELATION_TOL, samples=_DISC_SAMPLES):
    """Numerically check the defining relation g.(g_j z) = g_{g.j}(g.z)
    at points sampled inside every disc.

    Only the relation is checked.  The disc family itself need not be
    carried onto itself by the group: the torus reflections map each
    isometric disc onto a strictly larger disc around its partner, and
    nothing downstream depends on disc equivariance.
    """
    gens = surface.generators
    for elem in group.elements:
        for i, disc in enumerate(surface.discs):
            for s in range(samples):
                ang = 2.0 * math.pi * s / samples + 0.37
                z = complex(disc.center, 0.0) \
                    + 0.5 * disc.radius * complex(math.cos(ang), math.sin(ang))
                gz = elem.map.apply(z)
                for j in range(surface.n_letters):
                    if j == i:
                        continue
                    lhs = elem.map.apply(gens[j].apply(z))
                    rhs = gens[elem.action[j]].apply(gz)
                    if abs(lhs - rhs) > tol * (1.0 + abs(lhs)):
                        raise SymmetryError(
                            "relation fails for %s at letter %d, disc %d"
                            % (elem.name, j, i))


def _build_group(surface, maps, names):
    actions = []
    for m in maps:
        action = _letter_action(surface, m)
        if action is None:
            raise SymmetryError(
                "map %r does not permute the generating set" % m)
        actions.append(action)
    table = _multiplication_table(maps)
    orders = [_element_order(table, i) for i in range(len(maps))]
    inverses = tuple(row.index(0) for row in table)
    elements = tuple(GroupElement(i, names[i], maps[i], actions[i], orders[i])
                     for i in range(len(maps)))
    characters = tuple(Character(label, int(values[0]), values)
                       for label, values in _CHARACTER_DATA[len(maps)])
    group = SymmetryGroup(surface.rank, elements, table, inverses, characters)
    _check_characters(group)
    validate_group(surface, group)
    return group


def trivial_group(rank=2):
    """The one-element group; twisted machinery reduces to plain words."""
    identity = GroupElement(0, "e", MoebiusMap.identity(),
                            tuple(range(2 * rank)), 1)
    characters = (Character("A", 1, (1.0,)),)
    return SymmetryGroup(rank, (identity,), ((0,),), (0,), characters)


def klein_four_three_funnel(surface):
    """Symmetry group of the three-funnel generators.

    The full Klein four-group requires l1 = l2; otherwise only the
    reflection sigma1 survives and the two-element group is returned.
    """
    if surface.kind != "three_funnel":
        raise SymmetryError("expected a three-funnel surface, got %r"
                            % surface.kind)
    params = surface.params
    sigma1 = MoebiusMap(-1.0, 0.0, 0.0, 1.0)
    if abs(params["l1"] - params["l2"]) > _PARAM_TOL:
        return _build_group(surface, [MoebiusMap.identity(), sigma1],
                            ["e", "s1"])
    root = math.sqrt(params["a"])
    sigma2 = MoebiusMap.with_unit_det(0.0, root, 1.0 / root, 0.0, det=-1.0)
    return _build_group(
        surface,
        [MoebiusMap.identity(), sigma1, sigma2, sigma1 @ sigma2],
        ["e", "s1", "s2", "s1s2"])


def klein_four_torus(surface):
    """Symmetry group of the funneled-torus generators.

    Only the maximally symmetric member (l1 = l2, phi = pi/2) carries
    this group; anything else is rejected.
    """
    if surface.kind != "funneled_torus":
        raise SymmetryError("expected a funneled torus, got %r" % surface.kind)
    params = surface.params
    if abs(params["l1"] - params["l2"]) > _PARAM_TOL \
            or abs(params["phi"] - math.pi / 2.0) > _PARAM_TOL:
        raise SymmetryError(
            "torus symmetry group requires l1 = l2 and phi = pi/2")
    sigma1 = MoebiusMap(0.0, 1.0, 1.0, 0.0)
    sigma2 = MoebiusMap(0.0, 1.0, -1.0, 0.0)
    return _build_group(
        surface,
        [MoebiusMap.identity(), sigma1, sigma2, sigma1 @ sigma2],
        ["e", "s1", "s2", "s1s2"])


class TwistedWord(NamedTuple):
    word: tuple
    twist: int


def enumerate_twisted_closed(surface, group, n, g):
    """All reduced words closed up to the twist g, lexicographic order.

    The plain closing condition i_n != i_1 + r is replaced by
    g.i_n != i_1 + r; the identity twist reproduces the closed words.
    """
    if n < 1:
        raise ValueError("word length must be positive")
    n_letters = surface.n_letters
    rank = surface.rank
    action = group.elements[g].action
    out = []
    word = [0] * n

    def rec(pos):
        for letter in range(n_letters):
            if pos > 0 and word[pos - 1] == (letter + rank) % n_letters:
                continue
            word[pos] = letter
            if pos == n - 1:
                if action[letter] != (word[0] + rank) % n_letters:
                    out.append(TwistedWord(tuple(word), g))
            else:
                rec(pos + 1)

    rec(0)
    return out


def word_iterate(group, tw, k):
    """k-fold twisted concatenation g^(k-1).w ++ ... ++ g.w ++ w.

    For k a multiple of the twist order the result is a genuinely
    closed word.
    """
    if k < 1:
        raise ValueError("iteration count must be positive")
    out = []
    for p in range(k - 1, -1, -1):
        out.extend(group.act_word(group.power(tw.twist, p), tw.word))
    return tuple(out)


def _shift(group, tw):
    # right shift: the twisted image of the last letter moves to the front
    word, g = tw
    return TwistedWord((group.act_letter(g, word[-1]),) + word[:-1], g)


def _translate(group, h, tw):
    word, g = tw
    twist = group.multiply(group.multiply(h, g), group.inverses[h])
    return TwistedWord(group.act_word(h, word), twist)


def _orbit(group, tw):
    seen = {tw}
    frontier = [tw]
    while frontier:
        cur = frontier.pop()
        images = [_shift(group, cur)]
        images.extend(_translate(group, h, cur) for h in range(1, group.size))
        for nxt in images:
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _twisted_closed(group, word, g):
    n_letters = 2 * group.rank
    return group.act_letter(g, word[-1]) != (word[0] + group.rank) % n_letters


def _is_prime(group, tw):
    """False if tw equals the iterate of a strictly shorter twisted word."""
    word, g = tw
    n = len(word)
    for d in range(1, n):
        if n % d:
            continue
        k = n // d
        stem = word[n - d:]
        for root in range(group.size):
            if group.power(root, k) != g:
                continue
            if not _twisted_closed(group, stem, root):
                continue
            if all(word[j * d:(j + 1) * d]
                   == group.act_word(group.power(root, k - 1 - j), stem)
                   for j in range(k)):
                return False
    return True


@dataclass(frozen=True)
class OrbitRep:
    rep: TwistedWord
    n_w: int
    m_w: int
    iterate: tuple
    orbit_size: int


def orbit_representatives(surface, group, nmax):
    """Canonical representatives of all prime orbits with n_w <= nmax.

    The representative is the lexicographic minimum of the full orbit
    under shifts and group translation.  Orbit sizes are checked against
    the freeness requirement |G| * n_w; a violation aborts since the
    per-orbit weighting would silently be wrong otherwise.
    """
    if group.rank != surface.rank:
        raise SymmetryError("group and surface rank differ")
    reps = []
    for n in range(1, nmax + 1):
        seen = set()
        for g in range(group.size):
            for tw in enumerate_twisted_closed(surface, group, n, g):
                if tw in seen:
                    continue
                orbit = _orbit(group, tw)
                seen.update(orbit)
                if not _is_prime(group, tw):
                    continue
                if len(orbit) != group.size * n:
                    raise SymmetryError(
                        "non-free symmetry action: orbit of %r has size %d, "
                        "expected %d" % (tw, len(orbit), group.size * n))
                rep = min(orbit)
                m_w = group.elements[rep.twist].order
                reps.append(OrbitRep(rep, n, m_w,
                                     word_iterate(group, rep, m_w),
                                     len(orbit)))
    reps.sort(key=lambda r: (r.n_w, r.rep))
    return reps


def twisted_fixed_points(surface, group, tw):
    """Fixed pair of g_w composed after the twist.

    The composition can have determinant -1; attracting and repelling
    are still separated by the derivative magnitude.  The attracting
    point must land in the disc paired with the last letter, the
    repelling one in the disc of the untwisted first letter.
    """
    m = word_to_map(surface, tw.word) @ group.elements[tw.twist].map
    try:
        pair = fixed_points(m)
    except MoebiusError as exc:
        raise SymmetryError("twisted word %r is not hyperbolic: %s"
                            % (tw, exc)) from exc
    att_idx = (tw.word[-1] + surface.rank) % surface.n_letters
    rep_idx = group.act_letter(group.inverses[tw.twist], tw.word[0])
    for x, idx, tag in ((pair.attracting, att_idx, "attracting"),
                        (pair.repelling, rep_idx, "repelling")):
        if not surface.intervals[idx].contains(x, 1e-9 * (1.0 + abs(x))):
            raise SymmetryError("%s fixed point %.6g of %r misses interval %d"
                                % (tag, x, tw, idx))
    return pair
