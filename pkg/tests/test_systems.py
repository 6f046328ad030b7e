from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ergolab import oracles
from ergolab.algebra import AtomSpace, CylinderSet, atoms, cylinder, distance, empty, full, interval, measure
from ergolab.checks import golden_rotation, random_permutation, random_set
from ergolab.errors import PreconditionError, SemanticError
from ergolab.probes import make_rng
from ergolab.systems import (
    FinitePermutation,
    Odometer,
    Power,
    Product,
    Rotation,
    apply,
    apply_inverse,
    forward_saturation,
    full_saturation,
    identity,
    invariant_set,
    is_ergodic,
    is_totally_ergodic,
    iterate,
    periodic_profile,
    power,
)

SWAPS = FinitePermutation.uniform([1, 0, 3, 2])

SYSTEMS = {
    "odometer-2": Odometer(2),
    "odometer-3": Odometer(3),
    "odometer-2-power-3": power(Odometer(2), 3),
    "rotation-2/7": Rotation(Fraction(2, 7)),
    "golden": golden_rotation(),
    "swaps": SWAPS,
    "product": Product(FinitePermutation.uniform([1, 2, 0]), Odometer(2)),
}


def test_apply_examples():
    assert apply(Odometer(2), CylinderSet.from_indices(2, 3, [0])) == CylinderSet.from_indices(2, 3, [1])
    assert apply(Rotation(Fraction(1, 4)), interval(Fraction(7, 8), 1)) == interval(Fraction(1, 8), Fraction(1, 4))
    assert apply(SWAPS, atoms(SWAPS.space, [0, 2])) == atoms(SWAPS.space, [1, 3])


def test_apply_inverse_examples():
    assert apply_inverse(Odometer(2), CylinderSet.from_indices(2, 2, [0])) == CylinderSet.from_indices(2, 2, [3])
    a = Fraction(3, 10)
    A = interval(Fraction(1, 5), Fraction(7, 10))
    assert apply_inverse(Rotation(a), A) == apply(Rotation(1 - a), A)


def test_power_examples():
    assert apply(power(Odometer(2), 4), CylinderSet.from_indices(2, 3, [1])) == CylinderSet.from_indices(2, 3, [5])
    R3 = power(Rotation(Fraction(1, 3)), 3)
    A = interval(Fraction(1, 7), Fraction(2, 3))
    assert apply(R3, A) == A
    T = Odometer(5)
    assert power(T, 1) is T
    assert power(power(T, 2), 3) == Power(T, 6)
    with pytest.raises(PreconditionError):
        power(T, 0)


def test_periodic_profiles():
    assert periodic_profile(Rotation(Fraction(1, 3))).measure_of(3) == 1
    assert periodic_profile(Odometer(2)).measure_of(0) == 1
    assert periodic_profile(SWAPS).measure_of(2) == 1
    p = periodic_profile(Product(identity(2), Rotation(Fraction(1, 4))))
    assert p.is_periodic and p.period_lcm == 4


def test_construction_checks():
    with pytest.raises(SemanticError):
        FinitePermutation.uniform([0, 0, 1])
    with pytest.raises(SemanticError):
        FinitePermutation(AtomSpace((Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))), (1, 0, 2))
    with pytest.raises(SemanticError):
        Rotation(Fraction(1))
    with pytest.raises(SemanticError):
        Odometer(1)


def _has_invariant_union(b, k, max_level):
    # a nontrivial invariant cylinder union exists iff +k has several orbits at some level
    return any(oracles.odometer_power_orbits(b, k, L) > 1 for L in range(1, max_level + 1))


def test_odometer_power_ergodicity_matches_orbit_count():
    assert not is_ergodic(power(Odometer(6), 4)).ergodic
    assert _has_invariant_union(6, 4, 3)
    assert is_ergodic(power(Odometer(6), 5)).ergodic
    assert not _has_invariant_union(6, 5, 3)
    for b in (2, 3, 4, 6, 10):
        for k in range(1, 25):
            assert is_ergodic(power(Odometer(b), k)).ergodic == (not _has_invariant_union(b, k, 3)), (b, k)


def test_golden_rotation_totally_ergodic():
    T = golden_rotation()
    assert is_ergodic(T).ergodic
    assert is_totally_ergodic(T)
    assert all(is_ergodic(power(T, k)).ergodic for k in range(1, 20))
    assert not is_totally_ergodic(Odometer(2))


def test_invariant_sets():
    assert invariant_set(power(Odometer(2), 2)) == cylinder(2, "0")
    assert invariant_set(SWAPS) == atoms(SWAPS.space, [0, 1])
    assert invariant_set(Odometer(2)) is None


@pytest.mark.parametrize(
    "T",
    [
        power(Odometer(6), 4),
        power(Odometer(3), 6),
        Rotation(Fraction(3, 8)),
        SWAPS,
        Product(identity(3), Odometer(2)),
        Product(FinitePermutation.uniform([1, 0]), power(Odometer(2), 1)),
        Product(FinitePermutation.uniform([1, 0]), Rotation(Fraction(1, 2))),
    ],
    ids=repr,
)
def test_invariant_certificates_hold(T):
    v = is_ergodic(T)
    assert not v.ergodic
    A = v.invariant
    assert apply(T, A) == A
    assert 0 < measure(A) < 1


def test_permutation_ergodicity_matches_reachability():
    rng = make_rng(3)
    for _ in range(100):
        T = random_permutation(int(rng.integers(1, 513)), rng)
        # reachability from atom 0 along the cycle graph
        seen, x = {0}, T.perm[0]
        while x not in seen:
            seen.add(x)
            x = T.perm[x]
        assert is_ergodic(T).ergodic == (len(seen) == len(T.perm))


def test_forward_saturation_examples():
    s = forward_saturation(Odometer(2), CylinderSet.from_indices(2, 2, [0]), 100)
    assert s.stabilized and s.steps == 3 and s.set == full(Odometer(2).space)
    s = forward_saturation(SWAPS, atoms(SWAPS.space, [0]), 100)
    assert s.stabilized and s.steps == 1 and s.set == atoms(SWAPS.space, [0, 1])
    T = golden_rotation()
    s = forward_saturation(T, interval(0, Fraction(1, 10), field=5), 100)
    assert s.stabilized and s.steps <= 100 and s.set == full(T.space)


def test_full_saturation_examples():
    T = Product(identity(2), Odometer(2))
    A = atoms(T.space, [0])
    s = full_saturation(T, A, 100)
    assert s.stabilized and s.set == A and measure(s.set) == Fraction(1, 2)
    assert full_saturation(Odometer(3), cylinder(3, "21"), 100).set == full(Odometer(3).space)
    assert full_saturation(Odometer(3), empty(Odometer(3).space), 100).set == empty(Odometer(3).space)


@pytest.mark.parametrize("name", list(SYSTEMS))
def test_automorphism_properties(name):
    T = SYSTEMS[name]
    rng = make_rng(11)
    for _ in range(1000):
        A, B = random_set(T.space, rng, 5), random_set(T.space, rng, 5)
        TA, TB = apply(T, A), apply(T, B)
        assert measure(TA) == measure(A)
        assert distance(TA, TB) == distance(A, B)
        assert apply(T, A | B) == TA | TB
        assert apply(T, A & B) == TA & TB
        assert apply(T, ~A) == ~TA
        assert apply_inverse(T, TA) == A


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(0, 63))
def test_iterate_is_a_group_action(j, k, idx):
    T = Odometer(2)
    A = CylinderSet.from_indices(2, 6, [idx])
    assert iterate(T, iterate(T, A, j), k) == iterate(T, A, j + k)
    assert iterate(T, A, j) == CylinderSet.from_indices(2, 6, [(idx + j) % 64])


def test_profiles_sum_to_one():
    rng = make_rng(5)
    for _ in range(50):
        T = random_permutation(int(rng.integers(1, 80)), rng)
        p = periodic_profile(T)
        assert sum(m for _, m in p.periods) + p.aperiodic == 1
        assert p.is_periodic
