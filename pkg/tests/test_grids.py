"""Distribution grids against scalar residues and domain invariants."""

import math

import numpy as np
import pytest

from ruellezeta.cycle import (
    build_cache,
    evaluate_series,
    relative_error,
    residue_simple,
)
from ruellezeta.grids import (
    DistributionGrid,
    GridError,
    RefinementSpec,
    base_grid,
    describe_refinement,
    error_profile,
    refine_intervals,
    residue_grid,
    section_grid,
    section_targets,
)
from ruellezeta.weights import WeightSpec

LAM_FIRST_TORUS = -0.88474246748757945


def test_refinement_spec_validation():
    with pytest.raises(GridError):
        RefinementSpec(mode="quadtree")
    with pytest.raises(GridError):
        RefinementSpec(mode="level1", letters=(0,))
    with pytest.raises(GridError):
        RefinementSpec(mode="explicit", bounds=((0.1, 0.2),))
    assert describe_refinement(RefinementSpec()) == "full"
    assert describe_refinement(
        RefinementSpec(mode="level1", letters=(0, 3))) == "level1:0,3"
    label = describe_refinement(
        RefinementSpec(mode="explicit", bounds=((0.4, 0.41), (-0.43, -0.40))))
    assert label.startswith("explicit:")


def test_level1_images_sit_inside_inverse_interval(torus):
    spec = RefinementSpec(mode="level1", letters=(0, 3))
    axis_minus, axis_plus = refine_intervals(torus, spec)
    assert len(axis_minus) == 3 and len(axis_plus) == 3
    home_minus = torus.intervals[torus.inverse_letter(0)]
    home_plus = torus.intervals[torus.inverse_letter(3)]
    for img in axis_minus:
        assert home_minus.lo <= img.lo < img.hi <= home_minus.hi
    for img in axis_plus:
        assert home_plus.lo <= img.lo < img.hi <= home_plus.hi
    assert axis_minus == sorted(axis_minus)


def test_explicit_refinement_guards(torus):
    outer = torus.intervals[0]
    mid = 0.5 * (outer.lo + outer.hi)
    good = RefinementSpec(mode="explicit",
                          bounds=((outer.lo, mid), (outer.lo, mid)))
    refine_intervals(torus, good)
    with pytest.raises(GridError):
        refine_intervals(torus, RefinementSpec(
            mode="explicit", bounds=((5.0, 6.0), (outer.lo, mid))))
    with pytest.raises(GridError):
        refine_intervals(torus, RefinementSpec(
            mode="explicit", bounds=((mid, outer.lo), (outer.lo, mid))))


def test_explicit_full_intervals_equal_full_mode(torus):
    everything = tuple((iv.lo, iv.hi) for iv in torus.intervals)
    spec = RefinementSpec(mode="explicit", bounds=(everything, everything))
    full = section_targets(torus, 4)
    explicit = section_targets(torus, 4, spec)
    assert np.array_equal(full, explicit)


def test_section_targets_structure(torus):
    res = 3
    coords = section_targets(torus, res)
    # 4 intervals x res points per axis, same-interval pairs dropped
    assert coords.shape == (12 * res * res, 2)
    for xm, xp in coords:
        homes = [idx for idx, iv in enumerate(torus.intervals)
                 if iv.contains(xm)]
        assert len(homes) == 1
        assert not torus.intervals[homes[0]].contains(xp)
    again = section_targets(torus, res)
    assert np.array_equal(coords, again)


def test_section_resolution_guard(torus):
    with pytest.raises(GridError):
        section_targets(torus, 1)


def test_grid_matches_scalar_residues(torus):
    sigma = 0.05
    grid = section_grid(torus, None, LAM_FIRST_TORUS, sigma, 3, n=6)
    assert isinstance(grid, DistributionGrid)
    assert grid.mask.all()
    cache = build_cache(torus, None, 6,
                        WeightSpec(kind="gauss_section", sigma=sigma))
    for k in (0, 17, 53, len(grid.coords) - 1):
        target = tuple(grid.coords[k])
        want = residue_simple(cache, LAM_FIRST_TORUS, target=target)
        assert abs(grid.values[k] - want) <= 1e-13 * max(1e-300, abs(want))


def test_grid_metadata_and_determinism(torus, torus_group):
    one = section_grid(torus, torus_group, LAM_FIRST_TORUS, 1e-2, 3, n=6)
    two = section_grid(torus, torus_group, LAM_FIRST_TORUS, 1e-2, 3, n=6)
    assert np.array_equal(one.coords, two.coords)
    assert np.array_equal(one.values, two.values)
    assert np.array_equal(one.mask, two.mask)
    meta = one.metadata
    assert meta["mode"] == "section"
    assert meta["symmetry"] == "full"
    assert meta["nmax"] == 6
    assert meta["sigma"] == 1e-2
    assert meta["lambda0_re"] == LAM_FIRST_TORUS
    assert meta["refinement"] == "full"
    assert all(isinstance(v, (str, int, float)) for v in meta.values())


def test_weight_scale_zero_gives_zero_grid(torus):
    grid = section_grid(torus, None, LAM_FIRST_TORUS, 1e-2, 2, n=6,
                        weight_scale=0.0)
    assert np.all(grid.values == 0.0)
    assert grid.mask.all()
    assert grid.metadata["weight_scale"] == 0.0


def test_grid_rejects_unlocated_lambda(torus):
    with pytest.raises(GridError, match="no determinant factor vanishes"):
        section_grid(torus, None, -0.5 + 0.1j, 1e-2, 2, n=6)


def test_values_invariant_under_group_action(torus, torus_group):
    # the symmetry maps are boundary-angle isometries, the symmetrized
    # weight family is equivariant, so moving the target by any group
    # element leaves the residue unchanged
    sigma = 5e-3
    cache = build_cache(torus, torus_group, 6,
                        WeightSpec(kind="gauss_section", sigma=sigma,
                                   symmetrize=True))
    coords = section_targets(torus, 2)[::7]
    base_vals, base_ok = residue_grid(cache, LAM_FIRST_TORUS, coords)
    assert base_ok.all()
    scale = np.abs(base_vals).max()
    for g in range(1, torus_group.size):
        m = torus_group.elements[g].map
        moved = np.array([[m.apply_boundary(xm), m.apply_boundary(xp)]
                          for xm, xp in coords])
        vals, ok = residue_grid(cache, LAM_FIRST_TORUS, moved)
        assert ok.all()
        assert np.abs(vals - base_vals).max() <= 1e-9 * max(1.0, scale)


def test_sigma_sweep_stays_finite(torus, torus_group):
    for sigma in (1e-2, 1e-3):
        grid = section_grid(torus, torus_group, LAM_FIRST_TORUS, sigma, 2,
                            n=6)
        assert np.isfinite(grid.values[grid.mask].real).all()
        assert grid.mask.any()


def test_error_profile_matches_pointwise_relative_error(torus):
    sigma = 0.05
    cache = build_cache(torus, None, 6,
                        WeightSpec(kind="gauss_section", sigma=sigma))
    targets = section_targets(torus, 2)[::5]
    mean_got, max_got = error_profile(cache, LAM_FIRST_TORUS, targets, 5)
    point = [relative_error(
        evaluate_series(cache, LAM_FIRST_TORUS, target=tuple(t)), 5)
        for t in targets]
    assert abs(mean_got - np.mean(point)) <= 1e-12 * max(1.0, np.mean(point))
    assert abs(max_got - np.max(point)) <= 1e-12 * max(1.0, np.max(point))


def test_error_profile_order_guard(torus):
    cache = build_cache(torus, None, 4, WeightSpec(kind="constant"))
    with pytest.raises(GridError):
        error_profile(cache, LAM_FIRST_TORUS, [(0.4, -0.4)], 5)


def test_base_grid_masks_and_positivity(torus):
    disc = torus.discs[0]
    c, r = disc.center.real, disc.radius
    region = (c - 3 * r, c + 3 * r, 0.1 * r, 2 * r)
    grid = base_grid(torus, None, LAM_FIRST_TORUS, 0.2, 12, region, n=6)
    coords = grid.coords
    inside = np.abs(coords - disc.center) < 0.8 * disc.radius
    assert inside.any()
    assert not grid.mask[inside].any()
    assert np.all(grid.values[inside] == 0.0)
    live = grid.values[grid.mask]
    assert len(live) > 0
    top = np.abs(live.real).max()
    assert np.abs(live.imag).max() <= 1e-8 * top
    assert live.real.min() >= -1e-8 * top
    assert grid.metadata["mode"] == "base"


def test_base_grid_guards(torus):
    with pytest.raises(GridError):
        base_grid(torus, None, LAM_FIRST_TORUS, 0.1, 8, (1.0, 0.0, 0.1, 1.0))
    with pytest.raises(GridError):
        base_grid(torus, None, LAM_FIRST_TORUS, 0.1, 8, (0.0, 1.0, -0.5, 1.0))
    with pytest.raises(GridError):
        base_grid(torus, None, LAM_FIRST_TORUS, 0.1, 1, (0.0, 1.0, 0.1, 1.0))


def test_base_grid_repeat_is_identical(torus):
    region = (-1.0, 1.0, 0.1, 1.5)
    one = base_grid(torus, None, LAM_FIRST_TORUS, 0.3, 6, region, n=6)
    two = base_grid(torus, None, LAM_FIRST_TORUS, 0.3, 6, region, n=6)
    assert np.array_equal(one.values, two.values)
    assert np.array_equal(one.mask, two.mask)
