import warnings

import numpy as np
import pytest

from gtspline.classify import (
    WDC_TYPES,
    classification_report,
    column_reduction,
    column_reduction_trace,
    is_analysis_suitable,
    is_dual_compatible,
    is_void,
    is_vmcr,
    is_weakly_dc,
    random_admissible_mesh,
    refine_example4,
    refine_example4_with_knots,
    shifted,
    sparsity_matrix,
)
from gtspline.errors import RequiresAdPlus, StepLimitExceeded
from gtspline.independence import build_refinement_matrix
from gtspline.tmesh import ADMISSIBLE_PLUS, Anchor, KnotData, anchors, load_mesh, tensor_mesh, validate
from oracles import reduce_any_order

ALL_TYPES = set(WDC_TYPES)


def load(fixture_path, name):
    return load_mesh(fixture_path(name))


# -- sparsity proxy ------------------------------------------------------------------


def test_tensor_sparsity_is_permutation():
    s = sparsity_matrix(tensor_mesh(4, 4, 4, 4)).entries
    assert s.shape == (16, 16)
    assert np.all(s.sum(axis=0) == 1) and np.all(s.sum(axis=1) == 1)


def test_sparsity_matches_numeric_pattern_on_corner_step(fixture_path):
    mesh, knots = load(fixture_path, "corner_step_02")
    s = sparsity_matrix(mesh, knots).entries
    c = build_refinement_matrix(mesh, knots).pattern()
    assert np.array_equal(s, c)


def test_sparsity_matches_numeric_pattern_on_random_meshes():
    rng = np.random.default_rng(21)
    for _ in range(15):
        mesh = random_admissible_mesh(rng, 4, 3, int(rng.integers(3, 7)), int(rng.integers(3, 7)))
        s = sparsity_matrix(mesh).entries
        assert s.any(axis=1).all()
        assert np.array_equal(s, build_refinement_matrix(mesh).pattern())


# -- column reduction ---------------------------------------------------------------


def test_identity_reduces_to_void():
    assert is_void(column_reduction(np.eye(5, dtype=bool)))


def test_full_block_is_irreducible():
    m = np.ones((2, 2), dtype=bool)
    assert np.array_equal(column_reduction(m), m)


def test_lower_triangle_reduces_in_two_passes():
    red, removed = column_reduction_trace(np.array([[1, 0], [1, 1]], dtype=bool))
    assert is_void(red)
    assert removed == [0, 1]


def test_reduction_is_order_independent():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        shape = tuple(int(v) for v in rng.integers(1, 8, size=2))
        m = rng.random(shape) < rng.uniform(0.1, 0.6)
        red, removed = column_reduction_trace(m)
        assert len(removed) <= shape[1]
        kept = frozenset(set(range(shape[1])) - set(removed))
        assert reduce_any_order(m, rng) == kept
        assert is_void(red) == (not m[:, sorted(kept)].any())


# -- VMCR --------------------------------------------------------------------------------


@pytest.mark.parametrize("args", [(2, 2, 4, 4), (3, 3, 5, 5), (4, 4, 4, 4), (5, 4, 4, 6)])
def test_tensor_meshes_are_vmcr(args):
    assert is_vmcr(tensor_mesh(*args))


def test_corner_steps_are_vmcr():
    for mesh, knots in refine_example4_with_knots(4):
        assert is_vmcr(mesh, knots)


def test_analysis_suitable_fixture_is_vmcr(fixture_path):
    assert is_vmcr(*load(fixture_path, "as_mesh"))


# -- shifted anchors and weak dual compatibility -----------------------------------------


def test_anchor_not_shifted_from_itself():
    knots = KnotData.uniform(tensor_mesh(4, 4, 4, 4))
    a = anchors(tensor_mesh(4, 4, 4, 4))[5]
    for d in ("left-h", "right-h", "down-v", "up-v"):
        assert not shifted(a, a, d, knots)


def test_stacked_anchors_shift_vertically_only():
    mesh = tensor_mesh(4, 4, 4, 4)
    knots = KnotData.uniform(mesh)
    by_pos = {(a.i1, a.j1): a for a in anchors(mesh)}
    lower, upper = by_pos[(2, 2)], by_pos[(2, 3)]
    assert shifted(lower, upper, "down-v", knots)
    assert shifted(lower, upper, "up-v", knots)
    assert not shifted(lower, upper, "left-h", knots)
    assert not shifted(lower, upper, "right-h", knots)


def test_coinciding_end_knots_with_equal_multiplicity_not_shifted():
    mesh = tensor_mesh(4, 4, 4, 4)
    ks = [0, 1, 2, 3, 4, 5, 5, 6]  # indices -1..6, indices 4 and 5 share a value
    knots = KnotData.for_mesh(mesh, ks, list(range(8)))
    a1 = Anchor("vertex", 1, 1, 1, 1, local_s=(0, 1, 2, 3, 4), local_t=(-1, 0, 1, 2, 3))
    a2 = Anchor("vertex", 2, 2, 1, 1, local_s=(0, 1, 2, 3, 5), local_t=(-1, 0, 1, 2, 3))
    assert not shifted(a1, a2, "right-h", knots)
    # same value but different multiplicity inside the local vectors
    a3 = Anchor("vertex", 2, 2, 1, 1, local_s=(1, 2, 3, 4, 5), local_t=(-1, 0, 1, 2, 3))
    assert shifted(a1, a3, "right-h", knots)


def test_unknown_direction_rejected():
    a = anchors(tensor_mesh(4, 4, 4, 4))[0]
    with pytest.raises(ValueError):
        shifted(a, a, "sideways", KnotData.uniform(tensor_mesh(4, 4, 4, 4)))


def test_tensor_mesh_all_weak_types():
    assert is_weakly_dc(tensor_mesh(4, 4, 4, 4)) == ALL_TYPES


def test_three_junction_fixture_types(fixture_path):
    assert is_weakly_dc(*load(fixture_path, "wdc_rd_ru")) == {"RD", "RU"}


def test_corner_steps_weakly_dc_lu():
    for mesh, knots in refine_example4_with_knots(4):
        assert "LU" in is_weakly_dc(mesh, knots)


# -- dual compatibility and analysis suitability --------------------------------------------


def test_tensor_mesh_dual_compatible_and_suitable():
    m = tensor_mesh(4, 4, 5, 5)
    assert is_dual_compatible(m)
    assert is_analysis_suitable(m)


def test_three_junction_fixture_neither(fixture_path):
    mesh, _ = load(fixture_path, "wdc_rd_ru")
    assert not is_dual_compatible(mesh)
    assert not is_analysis_suitable(mesh)
    assert is_vmcr(mesh)


def test_corner_refinements_lose_dual_compatibility():
    meshes = refine_example4(4)
    assert is_dual_compatible(meshes[0])
    assert not any(is_dual_compatible(m) for m in meshes[1:])


def test_suitability_fixtures(fixture_path):
    assert is_analysis_suitable(load(fixture_path, "as_mesh")[0])
    assert not is_analysis_suitable(load(fixture_path, "non_as_mesh")[0])


def test_dual_compatibility_needs_admissible_plus(fixture_path):
    with pytest.raises(RequiresAdPlus):
        is_dual_compatible(load(fixture_path, "facing_tjunctions")[0])


def test_dual_compatibility_agrees_with_suitability():
    rng = np.random.default_rng(99)
    disagreements = 0
    for _ in range(60):
        mesh = random_admissible_mesh(rng, 4, 4, int(rng.integers(3, 8)), int(rng.integers(3, 8)), ad_plus=True)
        if is_dual_compatible(mesh) != is_analysis_suitable(mesh):
            disagreements += 1
    if disagreements:
        warnings.warn(f"dual compatibility and suitability disagree on {disagreements} meshes")


# -- corner refinement generator -----------------------------------------------------------


def test_zero_steps_is_tensor_start():
    (mesh,) = refine_example4(0)
    assert mesh == tensor_mesh(4, 4, 4, 4)


def test_step_limit():
    with pytest.raises(StepLimitExceeded):
        refine_example4(9)
    with pytest.raises(ValueError):
        refine_example4(-1)


def test_corner_steps_grow_and_stay_admissible_plus():
    meshes = refine_example4(4)
    counts = [len(anchors(m)) for m in meshes]
    assert counts == [16, 32, 48, 64, 80]
    assert all(validate(m) == ADMISSIBLE_PLUS for m in meshes)


def test_corner_fixture_files_match_generator(fixture_path):
    for k, (mesh, knots) in enumerate(refine_example4_with_knots(4)):
        assert load(fixture_path, f"corner_step_{k:02d}") == (mesh, knots)


# -- random generator and report ---------------------------------------------------------------


def test_random_meshes_reproducible():
    a = random_admissible_mesh(np.random.default_rng(5), 4, 4, 6, 6)
    b = random_admissible_mesh(np.random.default_rng(5), 4, 4, 6, 6)
    assert a == b


def test_random_ad_plus_request_honoured():
    rng = np.random.default_rng(8)
    for _ in range(20):
        assert validate(random_admissible_mesh(rng, 3, 4, 6, 5, ad_plus=True)) == ADMISSIBLE_PLUS


def test_report_fields(fixture_path):
    report = classification_report(*load(fixture_path, "corner_step_03"))
    assert report["vmcr"] is True
    assert "LU" in report["weakly_dc_types"]
    assert report["dual_compatible"] is False
    assert set(report) == {"admissible", "ad_plus", "analysis_suitable", "dual_compatible",
                           "weakly_dc_types", "vmcr", "anchors_count", "extensions"}


def test_report_on_non_admissible(fixture_path):
    report = classification_report(*load(fixture_path, "not_admissible"))
    assert report["admissible"] is False
    assert report["vmcr"] is None
