import dataclasses
import itertools
import math

import pytest

from ruellezeta.moebius import fixed_points
from ruellezeta.schottky import (Disc, SchottkyError, adjacency_matrix,
                                 build_funneled_torus, build_three_funnel,
                                 count_closed_words, cyclic_classes,
                                 enumerate_closed_words, geodesic_data,
                                 is_closed, is_reduced, primitive_root,
                                 validate_surface, word_to_map)


def brute_closed_words(rank, n):
    """Independent enumeration: filter the full letter product."""
    two_r = 2 * rank
    out = []
    for word in itertools.product(range(two_r), repeat=n):
        ok = all(word[i] != (word[i - 1] + rank) % two_r for i in range(1, n))
        if ok and word[-1] != (word[0] + rank) % two_r:
            out.append(word)
    return out


def test_builders_validate(torus, funnel):
    validate_surface(torus)
    validate_surface(funnel)
    assert torus.rank == funnel.rank == 2
    assert torus.n_letters == 4


def test_builder_rejects_bad_parameters():
    with pytest.raises(SchottkyError):
        build_funneled_torus(-1.0, 10.0, 1.0)
    with pytest.raises(SchottkyError):
        build_funneled_torus(10.0, 10.0, 0.0)
    with pytest.raises(SchottkyError):
        build_three_funnel(12.0, 12.0, math.nan)


def test_generator_traces_encode_lengths(torus, funnel):
    # the half-length parametrization puts |tr g_i| = 2 cosh(l_i / 2)
    assert abs(torus.generators[0].trace()) == pytest.approx(
        2.0 * math.cosh(5.0), rel=1e-12)
    assert abs(funnel.generators[1].trace()) == pytest.approx(
        2.0 * math.cosh(6.0), rel=1e-12)


def test_inverse_letter_layout(torus):
    assert [torus.inverse_letter(i) for i in range(4)] == [2, 3, 0, 1]


def test_validate_rejects_overlapping_discs(torus):
    fat = tuple(Disc(d.center, 10.0 * d.radius) for d in torus.discs)
    broken = dataclasses.replace(torus, discs=fat)
    with pytest.raises(SchottkyError):
        validate_surface(broken)


def test_word_predicates():
    assert is_reduced((0, 1, 0), 2)
    assert not is_reduced((0, 2), 2)        # letter followed by its inverse
    assert is_closed((0, 1), 2)
    assert not is_closed((0, 1, 2), 2)      # wraps onto an inverse


def test_closed_word_counts_match_trace_formula(torus):
    # oracle: brute-force filtering of all letter strings
    for n in range(1, 7):
        brute = brute_closed_words(2, n)
        assert count_closed_words(2, n) == len(brute)
        assert enumerate_closed_words(torus, n) == sorted(brute)
    assert [count_closed_words(2, n) for n in (1, 2, 3)] == [4, 12, 28]


def test_adjacency_matrix_structure():
    a = adjacency_matrix(2)
    assert a.shape == (4, 4)
    assert a.sum() == 12                     # each letter has 3 successors
    assert all(a[i, (i + 2) % 4] == 0 for i in range(4))


def test_cyclic_classes_partition(torus):
    for n in (2, 3, 4):
        classes = cyclic_classes(torus, n)
        covered = set()
        for cls in classes:
            rotations = {cls.representative[k:] + cls.representative[:k]
                         for k in range(n)}
            assert len(rotations) == cls.size
            assert cls.size % 1 == 0 and n % cls.size == 0
            assert cls.primitive == (cls.size == n)
            assert not rotations & covered
            covered |= rotations
        assert len(covered) == count_closed_words(2, n)


def test_primitive_root():
    assert primitive_root((0, 1, 0, 1)) == ((0, 1), 2)
    assert primitive_root((0, 1, 3)) == ((0, 1, 3), 1)
    assert primitive_root((0, 0, 0)) == ((0,), 3)


def test_word_to_map_applies_first_letter_first(torus):
    g0, g1 = torus.generators[0], torus.generators[1]
    m = word_to_map(torus, (0, 1))
    z = 0.3 + 1.1j
    assert abs(m.apply(z) - g1.apply(g0.apply(z))) < 1e-12


def test_geodesic_data_single_letter(torus):
    data = geodesic_data(torus, (0,))
    assert data.length == pytest.approx(10.0, rel=1e-12)
    pair = data.fixed
    # attracting point in the inverse letter's interval, repelling in
    # the letter's own interval
    assert torus.intervals[torus.inverse_letter(0)].contains(pair.attracting)
    assert torus.intervals[0].contains(pair.repelling)


def test_geodesic_data_rotations_are_rotation_fixed_points(torus):
    word = (0, 1, 0, 3)
    data = geodesic_data(torus, word)
    assert len(data.cyclic_points) == len(word)
    for j, pair in enumerate(data.cyclic_points):
        rot = word[j:] + word[:j]
        direct = fixed_points(word_to_map(torus, rot))
        assert pair.repelling == pytest.approx(direct.repelling, abs=1e-12)
        assert pair.attracting == pytest.approx(direct.attracting, abs=1e-12)
        assert torus.intervals[rot[0]].contains(pair.repelling)
        assert torus.intervals[torus.inverse_letter(rot[-1])].contains(
            pair.attracting)


def test_geodesic_data_iterate_length(torus):
    single = geodesic_data(torus, (0, 1))
    double = geodesic_data(torus, (0, 1, 0, 1))
    assert double.length == pytest.approx(2.0 * single.length, rel=1e-12)
    assert double.fixed.attracting == pytest.approx(single.fixed.attracting,
                                                    abs=1e-12)


def test_geodesic_data_rejects_open_words(torus):
    with pytest.raises(SchottkyError):
        geodesic_data(torus, (0, 2))
    with pytest.raises(SchottkyError):
        geodesic_data(torus, (0, 1, 2))
