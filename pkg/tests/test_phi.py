from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ergolab import oracles
from ergolab.algebra import CylinderSet, atoms, cylinder, empty, interval, measure
from ergolab.checks import golden_rotation, random_permutation, random_set
from ergolab.errors import CapabilityError
from ergolab.phi import (
    ergodic_decomposition,
    ergodic_power_profile,
    phi,
    phi_m,
    phi_star,
    wandering_rate,
)
from ergolab.probes import make_rng
from ergolab.systems import (
    FinitePermutation,
    Odometer,
    Product,
    Rotation,
    apply,
    identity,
    is_ergodic,
    periodic_profile,
    power,
)

SWAPS = FinitePermutation.uniform([1, 0, 3, 2])


def test_truncated_rate_examples():
    T, A = Odometer(2), CylinderSet.from_indices(2, 2, [0])
    assert [phi_m(T, A, m) for m in (0, 1, 3)] == [Fraction(1, 4), Fraction(1, 2), 1]
    assert all(phi_m(T, empty(T.space), m) == 0 for m in range(5))
    R, Q = Rotation(Fraction(1, 4)), interval(0, Fraction(1, 4))
    assert phi_m(R, Q, 1) == Fraction(1, 2)
    assert phi_m(R, Q, 3) == 1


@given(st.integers(2, 3), st.integers(1, 5), st.data())
def test_odometer_rates_match_cyclic_oracle(b, L, data):
    # at level L the odometer is the cycle +1 on b**L equally weighted atoms
    N = b**L
    idx = data.draw(st.lists(st.integers(0, N - 1), min_size=1, max_size=6, unique=True))
    m = data.draw(st.integers(0, 2 * N))
    A = CylinderSet.from_indices(b, L, idx)
    want = oracles.perm_rates([(i + 1) % N for i in range(N)], [Fraction(1, N)] * N, idx, m)
    assert wandering_rate(Odometer(b), A, m) == want


@given(st.integers(2, 40), st.data())
def test_rational_rotation_matches_grid_oracle(q, data):
    p = data.draw(st.integers(1, q - 1))
    den = data.draw(st.integers(1, 30))
    pts = sorted(data.draw(st.lists(st.integers(0, den), min_size=2, max_size=6, unique=True)))
    if len(pts) % 2:
        pts = pts[:-1]
    pieces = [(Fraction(pts[i], den), Fraction(pts[i + 1], den)) for i in range(0, len(pts), 2)]
    T = Rotation(Fraction(p, q))
    A = empty(T.space)
    for lo, hi in pieces:
        A = A | interval(lo, hi)
    r = phi(T, A)
    assert r.exact
    assert r.value == oracles.rotation_phi(p, q, pieces)


def test_limit_rate_examples():
    r = phi(SWAPS, atoms(SWAPS.space, [0]))
    assert r.exact and r.value == Fraction(1, 2) and r.steps_used == 1
    T = Product(identity(2), Odometer(2))
    r = phi(T, atoms(T.space, [0]))
    assert r.exact and r.value == Fraction(1, 2)


def test_limit_rate_one_on_level8_unions():
    rng = make_rng(2)
    T = Odometer(2)
    for _ in range(200):
        A = CylinderSet(2, 8, int.from_bytes(rng.bytes(32), "little")).normalize()
        if A.is_null():
            continue
        r = phi(T, A)
        assert r.exact and r.value == 1 and r.steps_used <= 255


def test_budget_exhaustion_gives_bracket():
    T = Odometer(2)
    r = phi(T, CylinderSet.from_indices(2, 10, [0]), m_max=20)
    assert not r.exact
    assert r.lower == Fraction(21, 1024) and r.upper == 1
    with pytest.raises(ValueError):
        r.value


@pytest.mark.parametrize("seed", range(4))
def test_monotone_and_starts_at_measure(seed):
    rng = make_rng(seed)
    for T in (Odometer(3), Rotation(Fraction(2, 9)), golden_rotation(), random_permutation(40, rng)):
        A = random_set(T.space, rng, 4)
        rates = wandering_rate(T, A, 30)
        assert rates[0] == measure(A)
        assert all(x <= y for x, y in zip(rates, rates[1:]))


def test_ergodicity_criterion_on_certificates():
    for T in (power(Odometer(6), 4), Rotation(Fraction(5, 12)), SWAPS, Product(identity(3), Odometer(2))):
        v = is_ergodic(T)
        r = phi(T, v.invariant)
        assert r.exact and r.value == measure(v.invariant) < 1


def test_periodic_stabilization_bound():
    rng = make_rng(9)
    for _ in range(30):
        T = random_permutation(int(rng.integers(1, 120)), rng)
        L = periodic_profile(T).period_lcm
        A = random_set(T.space, rng)
        r = phi(T, A)
        assert r.exact and r.steps_used <= L - 1
        assert r.value == phi_m(T, A, L - 1)


# ---------------------------------------------------------------- infimum over powers


def test_phi_star_half_cylinder():
    r, prof = phi_star(Odometer(2), cylinder(2, "0"))
    assert r.exact and r.value == Fraction(1, 2) and r.attained_at == 2
    brute = min(oracles.odometer_power_phi(2, ["0"], m) for m in range(1, 9))
    assert brute == Fraction(1, 2)
    assert prof.k0 == 2 and prof.K == (2,)


@pytest.mark.parametrize("level", range(1, 6))
def test_phi_star_attained_at_block_length(level):
    rng = make_rng(level)
    for _ in range(4):
        w = "".join(str(int(d)) for d in rng.integers(0, 2, level))
        r, _ = phi_star(Odometer(2), cylinder(2, w))
        assert r.exact and r.value == Fraction(1, 2**level)
        assert r.attained_at == 2**level
        assert min(oracles.odometer_power_phi(2, [w], m) for m in range(1, 65)) == r.value


def test_phi_star_totally_ergodic():
    T = golden_rotation()
    r, prof = phi_star(T, interval(0, Fraction(1, 10), field=5))
    assert r.exact and r.value == 1
    assert prof.k0 is None and prof.K == ()
    for k in range(1, 9):
        assert phi(power(T, k), interval(0, Fraction(1, 10), field=5)).value == 1


def test_phi_star_null():
    r, _ = phi_star(Odometer(3), empty(Odometer(3).space))
    assert r.exact and r.value == 0


@pytest.mark.parametrize("b,words,budget", [(2, ["000"], 4), (2, ["0000", "11"], 6), (3, ["00"], 4), (2, ["010101"], 12)])
def test_phi_star_bracket_is_sound(b, words, budget):
    T = Odometer(b)
    A = empty(T.space)
    for w in words:
        A = A | cylinder(b, w)
    r, _ = phi_star(T, A, exponent_budget=budget)
    brute = min(oracles.odometer_power_phi(b, words, m) for m in range(1, 13))
    true_inf = min(oracles.odometer_power_phi(b, words, m) for m in range(1, 3**7))
    assert r.lower <= true_inf <= r.upper
    assert r.lower <= brute
    if r.exact:
        assert r.value == true_inf


def test_power_profile_of_odometer_six():
    prof = ergodic_power_profile(Odometer(6), 12)
    assert prof.K == (2, 3)
    assert prof.kappa == 6
    assert prof.non_ergodic == (2, 3, 4, 6, 8, 9, 10, 12)


# ---------------------------------------------------------------- decomposition


def _check_decomposition(T, parts):
    total = sum(mu for _, mu in parts)
    assert total == 1
    for i, (p, mu) in enumerate(parts):
        assert apply(T, p) == p
        assert measure(p) == mu > 0
        for q, _ in parts[i + 1 :]:
            assert (p & q).is_null()


def test_decomposition_examples():
    parts = ergodic_decomposition(SWAPS)
    assert parts == [(atoms(SWAPS.space, [0, 1]), Fraction(1, 2)), (atoms(SWAPS.space, [2, 3]), Fraction(1, 2))]
    T2 = power(Odometer(2), 2)
    assert ergodic_decomposition(T2) == [(cylinder(2, "0"), Fraction(1, 2)), (cylinder(2, "1"), Fraction(1, 2))]


def test_decomposition_of_odometer_six_fourth_power():
    # +4 on the 6-adic integers preserves the residue mod 4 (4 divides 6**2), so four pieces
    T = power(Odometer(6), 4)
    parts = ergodic_decomposition(T)
    assert [mu for _, mu in parts] == [Fraction(1, 4)] * 4
    _check_decomposition(T, parts)
    assert oracles.odometer_power_orbits(6, 4, 2) == 4
    assert oracles.odometer_power_orbits(6, 4, 5) == 4


@pytest.mark.parametrize(
    "T",
    [
        power(Odometer(12), 18),
        power(Odometer(3), 5),
        Rotation(Fraction(3, 7)),
        Product(FinitePermutation.uniform([1, 0, 2]), Odometer(2)),
        Product(identity(2), golden_rotation()),
    ],
    ids=repr,
)
def test_decomposition_properties(T):
    _check_decomposition(T, ergodic_decomposition(T))


def test_decomposition_components_are_ergodic_for_odometer_powers():
    for b, k in [(2, 4), (6, 4), (6, 9), (10, 8)]:
        T = power(Odometer(b), k)
        parts = ergodic_decomposition(T)
        L = 6 if b == 2 else 4
        assert len(parts) == oracles.odometer_power_orbits(b, k, L)


def test_decomposition_capability_gap():
    class Other:
        space = None

    with pytest.raises((CapabilityError, TypeError)):
        ergodic_decomposition(Other())
