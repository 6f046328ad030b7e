from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ergolab import oracles
from ergolab.algebra import (
    AtomSet,
    AtomSpace,
    Circle,
    CylinderSet,
    CylinderSpace,
    IntervalSet,
    atoms,
    complement,
    cylinder,
    difference,
    distance,
    empty,
    format_set,
    full,
    interval,
    intersect,
    is_null,
    is_subset,
    measure,
    normalize,
    prefix_cover,
    symdiff,
    union,
)
from ergolab.errors import SpaceMismatchError, StructuralError
from ergolab.scalars import quadratic
from strategies import FAMILIES, cylinder_sets

GOLDEN = quadratic(Fraction(-1, 2), Fraction(1, 2), 5)


# ---------------------------------------------------------------- documented cases


def test_normalize_merges_adjacent_intervals():
    s = IntervalSet.build(Circle(), [(0, Fraction(1, 2)), (Fraction(1, 2), 1)])
    assert s == full(Circle())
    assert s.intervals == ((0, 1),)


def test_normalize_prunes_full_cylinder_level():
    s = CylinderSet(2, 2, 0b1111).normalize()
    assert (s.level, s.mask) == (0, 1)


def test_normalize_empty_atoms():
    sp = AtomSpace.uniform(4)
    assert AtomSet(sp, 0).normalize() == empty(sp)


def test_symdiff_of_nested_cylinders():
    assert symdiff(cylinder(2, "0"), cylinder(2, "00")) == cylinder(2, "01")


def test_interval_complement():
    c = complement(interval(Fraction(1, 3), Fraction(1, 2)))
    assert c.intervals == ((0, Fraction(1, 3)), (Fraction(1, 2), 1))


@given(st.sampled_from(list(FAMILIES)).flatmap(lambda k: FAMILIES[k]))
def test_union_with_empty_is_identity(abc):
    A = abc[0]
    assert union(A, empty(A.space)) == A


def test_measures():
    assert measure(CylinderSet.from_indices(2, 3, [0, 5])) == Fraction(1, 4)
    assert measure(interval(0, GOLDEN)) == GOLDEN
    sp = AtomSpace((Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 8)))
    assert measure(atoms(sp, [0, 2])) == Fraction(5, 8)


def test_distances():
    assert distance(cylinder(2, "0"), cylinder(2, "00") | cylinder(2, "01")) == 0
    A = cylinder(3, "12")
    assert distance(A, empty(A.space)) == measure(A) == Fraction(1, 9)
    assert distance(cylinder(2, "0"), cylinder(2, "1")) == 1


def test_null_checks():
    assert is_null(empty(CylinderSpace(2)))
    assert not is_null(CylinderSet.from_indices(2, 10, [17]))
    assert is_null(IntervalSet(Circle(), ()))


def test_word_reading_is_first_digit_first():
    # "011" has first digit 0, so its little-endian index is 0 + 1*2 + 1*4
    assert cylinder(2, "011").indices == (6,)
    assert cylinder(2, "011").words() == ["011"]


def test_prefix_cover_is_maximal():
    s = cylinder(2, "0") | cylinder(2, "11") | cylinder(2, "101")
    assert prefix_cover(s) == ["0", "101", "11"]
    assert format_set(s) == 'cyl("0") | cyl("101") | cyl("11")'


def test_structural_errors():
    with pytest.raises(StructuralError):
        interval(Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(StructuralError):
        cylinder(2, "02")
    with pytest.raises(StructuralError):
        AtomSpace((Fraction(1, 2), Fraction(1, 3)))


def test_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        cylinder(2, "0") | cylinder(3, "0")
    with pytest.raises(SpaceMismatchError):
        interval(0, GOLDEN) | interval(0, Fraction(1, 2), field=2)


def test_quadratic_endpoints_merge_exactly():
    a = interval(0, GOLDEN)
    b = interval(GOLDEN, 1, field=5)
    assert a | b == full(Circle(5))
    assert measure(~a) == 1 - GOLDEN


# ---------------------------------------------------------------- algebra laws


@given(st.sampled_from(list(FAMILIES)).flatmap(lambda k: FAMILIES[k]))
def test_metric_and_lattice_laws(abc):
    A, B, C = abc
    assert distance(A, C) <= distance(A, B) + distance(B, C)
    assert measure(A | B) + measure(A & B) == measure(A) + measure(B)
    assert ~(A | B) == ~A & ~B
    assert ~(A & B) == ~A | ~B
    assert A & (B | C) == (A & B) | (A & C)
    assert A | (B & C) == (A | B) & (A | C)
    assert A - B == A & ~B
    assert (A ^ B) == (A - B) | (B - A)
    assert is_subset(A & B, A)
    assert normalize(normalize(A)) == normalize(A)
    assert 0 <= measure(A) <= 1


@given(st.integers(0, 5), st.data())
def test_refinement_preserves_class(extra, data):
    s = data.draw(cylinder_sets(3, 3))
    r = s.refine(s.level + extra)
    assert r.measure() == s.measure()
    assert r.normalize() == s


@given(st.integers(2, 3), st.data())
def test_cylinder_ops_match_word_oracle(b, data):
    L = data.draw(st.integers(0, 6 if b == 2 else 4))
    word = st.text(alphabet="".join(map(str, range(b))), max_size=L)
    P = data.draw(st.lists(word, max_size=6))
    Q = data.draw(st.lists(word, max_size=6))
    X, Y = oracles.cyl_words(b, L, P), oracles.cyl_words(b, L, Q)

    def build(ps):
        s = empty(CylinderSpace(b))
        for p in ps:
            s = s | cylinder(b, p)
        return s

    A, B = build(P), build(Q)
    want = oracles.word_ops(b, L, X, Y)
    got = {
        "union": union(A, B),
        "intersect": intersect(A, B),
        "symdiff": symdiff(A, B),
        "difference": difference(A, B),
        "complement": complement(A),
    }
    for k, v in got.items():
        assert oracles.cyl_words(b, L, prefix_cover(v)) == want[k], k
    assert measure(A) == oracles.word_measure(b, L, X)


@given(st.integers(1, 10), st.data())
def test_atom_ops_match_bitvector_oracle(n, data):
    sp = AtomSpace.uniform(n)
    x = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    y = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    A = atoms(sp, [i for i in range(n) if x[i]])
    B = atoms(sp, [i for i in range(n) if y[i]])
    assert (A | B).members == tuple(i for i in range(n) if x[i] or y[i])
    assert (A & B).members == tuple(i for i in range(n) if x[i] and y[i])
    assert (A ^ B).members == tuple(i for i in range(n) if x[i] != y[i])
    assert (~A).members == tuple(i for i in range(n) if not x[i])
    assert measure(A) == Fraction(sum(x), n)


@pytest.mark.parametrize(
    "space",
    [CylinderSpace(2), CylinderSpace(3), Circle(), AtomSpace.uniform(9)],
    ids=["cylinder-2", "cylinder-3", "interval", "atom"],
)
def test_normalize_idempotent_on_seeded_bulk(space):
    from ergolab.checks import random_set
    from ergolab.probes import make_rng

    rng = make_rng(7)
    for _ in range(10_000):
        s = random_set(space, rng, max_level=4)
        n = normalize(s)
        assert normalize(n) == n
        assert measure(n) == measure(s)
