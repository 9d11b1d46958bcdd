import pytest
from sympy import jacobi_symbol

from services.errors import InvalidInputError, WeightSpecError
from services.residue_core import euler_phi, units
from services.weight_sets import (
    KIND_EXPLICIT,
    KIND_L,
    KIND_Q,
    KIND_S,
    KIND_U,
    KIND_U_SQUARED,
    _orbit_mask_for,
    build,
    cartesian_image_contains,
    complement_in_units,
    coset_representatives,
    image_under_map,
    index_in_units,
    orbit_canon,
    parse_weight_spec,
    w_count,
)


# === MEMBERS AND INDICES ===

def test_s15_members():
    weights = build(KIND_S, 15)
    assert weights.members == (1, 2, 4, 8)
    assert weights.spec == "S"
    assert weights.is_group
    assert 7 not in weights and 17 in weights


def test_q7_and_squares_mod_15():
    assert build(KIND_Q, 7).members == (1, 2, 4)
    assert build(KIND_U_SQUARED, 15).members == (1, 4)


@pytest.mark.parametrize("n", [15, 21, 33, 35, 77, 539, 1001])
def test_s_is_jacobi_kernel_of_index_two(n):
    weights = build(KIND_S, n)
    assert set(weights.members) == {a for a in units(n) if jacobi_symbol(a, n) == 1}
    assert index_in_units(weights) == 2


@pytest.mark.parametrize("n", [9, 25, 49, 225])
def test_s_is_everything_for_squares(n):
    assert index_in_units(build(KIND_S, n)) == 1


@pytest.mark.parametrize("n,p_prime", [(77, 7), (77, 11), (1001, 7), (1001, 13), (539, 7)])
def test_l_membership(n, p_prime):
    weights = build(KIND_L, n, p_prime=p_prime)
    assert weights.spec == f"L:{p_prime}"
    for a in units(n):
        assert (a in weights) == (jacobi_symbol(a, n) == jacobi_symbol(a, p_prime))


def test_l_for_two_primes_is_the_other_residue_class():
    weights = build(KIND_L, 77, p_prime=7)
    assert set(weights.members) == {a for a in units(77) if jacobi_symbol(a, 11) == 1}
    assert len(weights) == euler_phi(77) // 2


def test_usq_index_mod_15():
    assert index_in_units(build(KIND_U_SQUARED, 15)) == 4


def test_explicit_weights():
    group = build(KIND_EXPLICIT, 15, values=[4, 1])
    assert group.spec == "explicit:1,4"
    assert group.is_group
    assert group == build(KIND_U_SQUARED, 15)

    loose = build(KIND_EXPLICIT, 7, values=[1, 2])
    assert not loose.is_group
    assert loose.orbit_representatives() == [1, 2, 3, 4, 5, 6]
    with pytest.raises(InvalidInputError):
        index_in_units(loose)
    with pytest.raises(InvalidInputError):
        build(KIND_EXPLICIT, 7, values=[0, 1])
    with pytest.raises(InvalidInputError):
        build(KIND_EXPLICIT, 7, values=[])


# === SPEC STRINGS ===

def test_parse_weight_spec():
    assert parse_weight_spec("S", 15) == build(KIND_S, 15)
    assert parse_weight_spec(" L:7 ", 77).p_prime == 7
    assert parse_weight_spec("explicit:1,4", 15).spec == "explicit:1,4"
    assert parse_weight_spec("U", 15).kind == KIND_U


@pytest.mark.parametrize("spec", ["", "X", "L:abc", "S:3", "explicit:a,b", "Usq:1"])
def test_parse_weight_spec_rejects(spec):
    with pytest.raises(WeightSpecError):
        parse_weight_spec(spec, 15)


def test_named_kinds_check_their_modulus():
    with pytest.raises(InvalidInputError):
        parse_weight_spec("L:5", 77)
    with pytest.raises(InvalidInputError):
        parse_weight_spec("Q", 15)
    with pytest.raises(InvalidInputError):
        parse_weight_spec("S", 16)
    with pytest.raises(InvalidInputError):
        build("Z", 15)


# === RESIDUE COUNTS AND ORBITS ===

def test_w_count():
    assert w_count(1, 15) == 0
    assert w_count(7, 15) == 1
    assert w_count(2, 15) == 2
    with pytest.raises(InvalidInputError):
        w_count(3, 15)
    with pytest.raises(InvalidInputError):
        w_count(1, 45)


@pytest.mark.parametrize("n", [15, 35, 77, 1001])
def test_s_membership_is_even_w_count(n):
    weights = build(KIND_S, n)
    for a in units(n):
        assert (a in weights) == (w_count(a, n) % 2 == 0)


def test_orbit_canon():
    assert orbit_canon(build(KIND_Q, 7), 4) == 1
    assert orbit_canon(build(KIND_Q, 7), 5) == 3
    assert orbit_canon(build(KIND_S, 15), 7) == 7
    assert orbit_canon(build(KIND_U, 77), 21) == 7
    assert orbit_canon(build(KIND_U, 77), 0) == 0


def test_orbit_representatives_of_units_are_divisors():
    assert build(KIND_U, 1001).orbit_representatives() == [1, 7, 11, 13, 77, 91, 143]


def test_orbit_masks_are_shared_per_orbit_and_bounded():
    q7 = build(KIND_Q, 7)
    assert q7.orbit_mask(5) == q7.orbit_mask(3) == 0b1101000
    assert q7.orbit_mask(4) == 0b10110
    loose = build(KIND_EXPLICIT, 7, values=[1, 2])
    assert loose.orbit_mask(3) == 0b1001000
    info = _orbit_mask_for.cache_info()
    assert info.maxsize is not None and info.currsize <= info.maxsize


def test_complement_and_cosets():
    assert complement_in_units(build(KIND_S, 15)) == frozenset({7, 11, 13, 14})
    assert coset_representatives(build(KIND_S, 15)) == [1, 7]
    assert coset_representatives(build(KIND_U_SQUARED, 15)) == [1, 2, 7, 11]
    assert coset_representatives(build(KIND_U, 77)) == [1]


# === IMAGES UNDER NATURAL MAPS ===

def test_images_of_jacobi_kernels():
    assert image_under_map(build(KIND_S, 1001), 143) == frozenset(units(143))
    assert image_under_map(build(KIND_S, 539), 49) == frozenset(units(49))
    assert image_under_map(build(KIND_S, 539), 11) == frozenset(build(KIND_Q, 11).members)


def test_images_of_l_sets():
    assert image_under_map(build(KIND_L, 77, p_prime=7), 11) == frozenset(build(KIND_Q, 11).members)
    assert image_under_map(build(KIND_L, 77, p_prime=7), 7) == frozenset(units(7))
    assert image_under_map(build(KIND_L, 1001, p_prime=7), 143) == frozenset(build(KIND_S, 143).members)
    assert image_under_map(build(KIND_L, 1001, p_prime=11), 143) == frozenset(units(143))
    assert image_under_map(build(KIND_L, 1001, p_prime=11), 91) == frozenset(build(KIND_S, 91).members)


@pytest.mark.slow
def test_image_of_s7007_is_l1001():
    image = image_under_map(build(KIND_S, 7007), 1001)
    assert image == frozenset(build(KIND_L, 1001, p_prime=7).members)


def test_image_rejects_non_divisor():
    with pytest.raises(InvalidInputError):
        image_under_map(build(KIND_S, 77), 5)


def test_cartesian_image_contains():
    s539 = build(KIND_S, 539)
    q11 = frozenset(build(KIND_Q, 11).members)
    assert cartesian_image_contains(s539, 49, 11, frozenset(units(49)), q11)

    s77 = build(KIND_S, 77)
    q7 = frozenset(build(KIND_Q, 7).members)
    assert cartesian_image_contains(s77, 7, 11, q7, q11)
    assert not cartesian_image_contains(s77, 7, 11, frozenset(units(7)), q11)
    with pytest.raises(InvalidInputError):
        cartesian_image_contains(s77, 7, 7, q7, q7)
