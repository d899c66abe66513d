import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nodalqmc.configuration import (
    DOWN,
    UP,
    ElectronConfiguration,
    RotationPath,
    SpinPermutation,
    apply_permutation,
    interparticle_distances,
    make_be_reference_point,
    rotate_all,
    spin_preserving_permutations,
)
from nodalqmc.rng import derive_rng, derive_seed

BE = (UP, UP, DOWN, DOWN)

coords = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(coords, coords, coords)


def test_distances_pythagoras():
    c = ElectronConfiguration([[1, 0, 0], [0, 1, 0]], (UP, DOWN))
    d = interparticle_distances(c)
    assert d.r[0] == 1.0 and d.r[1] == 1.0
    assert d.rij[0, 1] == pytest.approx(np.sqrt(2.0), abs=1e-15)


def test_electron_at_origin():
    d = ElectronConfiguration([[0, 0, 0]], (UP,)).distances()
    assert d.r[0] == 0.0


@settings(max_examples=50, deadline=None)
@given(st.lists(vec3, min_size=2, max_size=4))
def test_distances_match_brute_force(points):
    pos = np.array(points)
    c = ElectronConfiguration(pos, (UP,) * len(points))
    d = c.distances()
    for i in range(len(points)):
        assert d.r[i] == pytest.approx(np.linalg.norm(pos[i]), abs=1e-12)
        for j in range(len(points)):
            assert d.rij[i, j] == pytest.approx(np.linalg.norm(pos[i] - pos[j]), abs=1e-12)


@pytest.mark.parametrize("pos,spins", [
    (np.zeros((0, 3)), ()),
    ([[np.nan, 0, 0]], (UP,)),
    ([[0, 0, 0], [1, 1, 1]], (UP,)),
    ([[0, 0, 0]], ("sideways",)),
])
def test_configuration_rejects_bad_input(pos, spins):
    with pytest.raises(ValueError):
        ElectronConfiguration(pos, spins)


def test_configuration_is_immutable():
    c = ElectronConfiguration([[1, 0, 0]], (UP,))
    with pytest.raises(ValueError):
        c.positions[0, 0] = 3.0


def test_transposition_involution(rng):
    c = ElectronConfiguration(rng.standard_normal((4, 3)), BE, 4)
    p = SpinPermutation.transposition(4, 0, 1)
    twice = apply_permutation(apply_permutation(c, p), p)
    assert np.array_equal(twice.positions, c.positions)


def test_transposition_swaps():
    c = ElectronConfiguration([[1, 0, 0], [0, 2, 0]], (UP, UP))
    s = apply_permutation(c, SpinPermutation.transposition(2, 0, 1))
    assert np.array_equal(s.positions, [[0, 2, 0], [1, 0, 0]])


def test_parity():
    p12 = SpinPermutation.transposition(4, 0, 1)
    p34 = SpinPermutation.transposition(4, 2, 3)
    assert p12.parity == -1
    assert p12.compose(p34).parity == 1
    assert SpinPermutation.identity(4).parity == 1


def test_spin_violating_permutation_rejected():
    c = ElectronConfiguration(np.eye(3)[:2], (UP, DOWN))
    with pytest.raises(ValueError):
        apply_permutation(c, SpinPermutation.transposition(2, 0, 1))


def test_spin_preserving_sets():
    assert len(spin_preserving_permutations(BE)) == 4
    assert len(spin_preserving_permutations((UP, UP))) == 2
    perms = spin_preserving_permutations((UP, DOWN, UP))
    assert [p.mapping for p in perms] == [(0, 1, 2), (2, 1, 0)]


def test_not_a_bijection():
    with pytest.raises(ValueError):
        SpinPermutation((0, 0, 1))


def test_rotation_identity_and_full_turn(rng):
    c = ElectronConfiguration(rng.standard_normal((3, 3)), (UP, DOWN, UP), 3)
    axis = np.array([0.0, 0.6, 0.8])
    assert np.array_equal(rotate_all(c, axis, 0.0).positions, c.positions)
    np.testing.assert_allclose(rotate_all(c, axis, 2 * np.pi).positions, c.positions, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(vec3.filter(lambda v: np.linalg.norm(v) > 1e-3), st.floats(-7, 7))
def test_rotation_preserves_distances(axis, angle):
    axis = np.array(axis) / np.linalg.norm(axis)
    pos = derive_rng(5, "rot").standard_normal((4, 3))
    c = ElectronConfiguration(pos, BE, 4)
    a, b = c.distances(), rotate_all(c, axis, angle).distances()
    np.testing.assert_allclose(a.r, b.r, atol=1e-12)
    np.testing.assert_allclose(a.rij, b.rij, atol=1e-12)


def test_rotation_axis_must_be_unit():
    c = ElectronConfiguration([[1, 0, 0]], (UP,))
    with pytest.raises(ValueError):
        rotate_all(c, [0, 0, 2], 0.1)


def test_rotation_path_endpoints():
    c = ElectronConfiguration([[1, 0, 0], [0, 1, 0]], (UP, UP))
    path = RotationPath(np.array([0.0, 0.0, 1.0]), c)
    end = path(1.0).positions
    np.testing.assert_allclose(end, -c.positions, atol=1e-12)
    batch = path.positions([0.0, 0.5, 1.0])
    np.testing.assert_allclose(batch[1], [[0, 1, 0], [-1, 0, 0]], atol=1e-12)


def test_be_reference_point_flags():
    ref = make_be_reference_point([1, 0, 0], [0, 1, 0])
    assert ref.perpendicular and not ref.parallel
    ref = make_be_reference_point([1, 0, 0], np.array([1, 1, 0]) / np.sqrt(2))
    assert not ref.perpendicular
    np.testing.assert_allclose(np.abs(ref.axis), [0, 0, 1], atol=1e-12)
    np.testing.assert_allclose(ref.config.positions[1], -ref.config.positions[0])
    assert ref.config.spins == BE


def test_be_reference_point_parallel_fallback():
    r1 = np.array([0.3, -1.2, 0.5])
    ref = make_be_reference_point(r1, 2 * r1)
    assert ref.parallel
    assert abs(np.dot(ref.axis, r1)) < 1e-12
    assert np.linalg.norm(ref.axis) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        make_be_reference_point([0, 0, 0], r1)


def test_derived_streams_are_reproducible():
    a = derive_rng(3, "dmc", 7).random(5)
    b = derive_rng(3, "dmc", 7).random(5)
    c = derive_rng(3, "dmc", 8).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert derive_seed(1, "x") == derive_seed(1, "x") != derive_seed(2, "x")
