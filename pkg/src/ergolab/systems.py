"""Concrete invertible measure-preserving maps acting exactly on set classes.

Four classes are supported (finite permutations of weighted atoms, the b-adic
odometer, circle rotations, and products of a finite permutation with another
system), together with symbolic powers.  Each class comes with an exact
periodic-point profile and an ergodicity decision rule that produces a
nontrivial invariant set whenever the answer is negative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Union

from .algebra import (
    AtomSet,
    AtomSpace,
    Circle,
    CylinderSet,
    CylinderSpace,
    IntervalSet,
    ProductSet,
    ProductSpace,
    SetClass,
    Space,
    ZERO,
    empty,
    full,
    is_subset,
)
from .errors import PreconditionError, SemanticError, SpaceMismatchError
from .scalars import Scalar, as_scalar, field_of, frac, is_rational

__all__ = [
    "FinitePermutation",
    "Odometer",
    "Rotation",
    "Product",
    "Power",
    "System",
    "PeriodicProfile",
    "ErgodicityVerdict",
    "Saturation",
    "identity",
    "apply",
    "apply_inverse",
    "iterate",
    "power",
    "periodic_profile",
    "is_ergodic",
    "is_totally_ergodic",
    "invariant_set",
    "forward_saturation",
    "full_saturation",
]


@dataclass(frozen=True)
class FinitePermutation:
    """Permutation of weighted atoms; ``perm[i]`` is the image of atom ``i``."""

    space: AtomSpace
    perm: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        n = self.space.size
        if len(perm) != n or sorted(perm) != list(range(n)):
            raise SemanticError("permutation is not a bijection of the atoms")
        w = self.space.weights
        for cyc in self.cycles:
            if any(w[i] != w[cyc[0]] for i in cyc):
                raise SemanticError(f"atom weights vary along cycle {cyc}; the map would not preserve measure")

    @classmethod
    def uniform(cls, perm) -> "FinitePermutation":
        return cls(AtomSpace.uniform(len(perm)), tuple(perm))

    @cached_property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        """Cycles in order of their smallest atom, each starting from that atom."""
        seen = [False] * len(self.perm)
        out = []
        for start in range(len(self.perm)):
            if seen[start]:
                continue
            cyc, i = [], start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.perm[i]
            out.append(tuple(cyc))
        return tuple(out)


@dataclass(frozen=True)
class Odometer:
    """Adding machine ``x -> x + 1`` (with carry) on base-``base`` digit sequences."""

    base: int

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 2:
            raise SemanticError(f"odometer base must be an integer >= 2, got {self.base!r}")

    @property
    def space(self) -> CylinderSpace:
        return CylinderSpace(self.base)


@dataclass(frozen=True)
class Rotation:
    """Circle rotation ``x -> x + alpha mod 1``."""

    alpha: Scalar

    def __post_init__(self):
        a = as_scalar(self.alpha)
        object.__setattr__(self, "alpha", a)
        if not (0 <= a < 1):
            raise SemanticError("rotation number must lie in [0, 1)")

    @property
    def space(self) -> Circle:
        return Circle(field_of(self.alpha))


@dataclass(frozen=True)
class Product:
    """Direct product ``(i, x) -> (perm(i), fiber(x))``."""

    finite: FinitePermutation
    fiber: "System"

    @property
    def space(self) -> ProductSpace:
        return ProductSpace(self.finite.space.weights, self.fiber.space)


@dataclass(frozen=True)
class Power:
    """``base`` iterated ``exponent`` times, kept symbolic.  Build it with :func:`power`."""

    base: "System"
    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise PreconditionError("power exponent must be >= 1")

    @property
    def space(self) -> Space:
        return self.base.space


System = Union[FinitePermutation, Odometer, Rotation, Product, Power]


def identity(n: int) -> FinitePermutation:
    """Identity on ``n`` equally weighted atoms."""
    return FinitePermutation.uniform(range(n))


def power(T: System, k: int) -> System:
    if not isinstance(k, int) or k < 1:
        raise PreconditionError(f"power exponent must be a positive integer, got {k!r}")
    if k == 1:
        return T
    if isinstance(T, Power):
        return Power(T.base, T.exponent * k)
    return Power(T, k)


# ---------------------------------------------------------------- action


@lru_cache(maxsize=4096)
def _perm_power(T: FinitePermutation, k: int) -> tuple[int, ...]:
    out = [0] * len(T.perm)
    for cyc in T.cycles:
        L = len(cyc)
        s = k % L
        for pos, i in enumerate(cyc):
            out[i] = cyc[(pos + s) % L]
    return tuple(out)


def _permute_mask(mapping, mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << mapping[low.bit_length() - 1]
        mask ^= low
    return out


def _rotate_cylinders(s: CylinderSet, k: int) -> CylinderSet:
    W = s.width
    k %= W
    if k == 0 or s.mask == 0:
        return s
    m = s.mask
    rotated = ((m << k) | (m >> (W - k))) & ((1 << W) - 1)
    return CylinderSet(s.base, s.level, rotated)


def _translate(s: IntervalSet, t: Scalar) -> IntervalSet:
    if t == 0 or not s.intervals:
        return s
    pieces = []
    for l, r in s.intervals:
        nl = frac(l + t)
        nr = nl + (r - l)
        if nr <= 1:
            pieces.append((nl, nr))
        else:
            pieces.append((nl, Fraction(1)))
            pieces.append((ZERO, nr - 1))
    return IntervalSet.build(s.space, pieces)


def _act(T: System, s: SetClass, k: int) -> SetClass:
    """Image of ``s`` under ``T**k`` for any integer ``k``."""
    if k == 0:
        return s
    if isinstance(T, Power):
        return _act(T.base, s, T.exponent * k)
    if isinstance(T, Odometer):
        return _rotate_cylinders(s, k)
    if isinstance(T, Rotation):
        return _translate(s, frac(k * T.alpha))
    if isinstance(T, FinitePermutation):
        return AtomSet(s.space, _permute_mask(_perm_power(T, k), s.mask))
    if isinstance(T, Product):
        mapping = _perm_power(T.finite, k)
        fibers = [None] * len(s.fibers)
        for i, f in enumerate(s.fibers):
            fibers[mapping[i]] = _act(T.fiber, f, k)
        return ProductSet(s.space, tuple(fibers))
    raise TypeError(f"unknown system {T!r}")


def _check_space(T: System, s: SetClass):
    sp = T.space
    if s.space is not sp and s.space != sp:
        raise SpaceMismatchError(f"set lives on {s.space}, system acts on {sp}")


def apply(T: System, s: SetClass) -> SetClass:
    """Exact image ``T(s)`` in canonical form."""
    _check_space(T, s)
    return _act(T, s.normalize(), 1)


def apply_inverse(T: System, s: SetClass) -> SetClass:
    _check_space(T, s)
    return _act(T, s.normalize(), -1)


def iterate(T: System, s: SetClass, k: int) -> SetClass:
    """``T**k (s)`` for any integer ``k`` (negative means inverse images)."""
    _check_space(T, s)
    return _act(T, s.normalize(), k)


# ---------------------------------------------------------------- structure


def _concrete(T: System) -> System:
    """Rewrite powers into an equal system of a base class where possible.

    Powers of odometers stay symbolic because their ergodicity depends on the
    exponent, not on a rewritten parameter.
    """
    if not isinstance(T, Power):
        return T
    B, k = T.base, T.exponent
    if isinstance(B, Odometer):
        return T
    if isinstance(B, Rotation):
        return Rotation(frac(k * B.alpha))
    if isinstance(B, FinitePermutation):
        return FinitePermutation(B.space, _perm_power(B, k))
    if isinstance(B, Product):
        return Product(FinitePermutation(B.finite.space, _perm_power(B.finite, k)), power(B.fiber, k))
    raise TypeError(f"unknown system {B!r}")


@dataclass(frozen=True)
class PeriodicProfile:
    """Measures of the sets ``P_n`` of points with exact period ``n``, plus the aperiodic part."""

    periods: tuple  # ((n, measure), ...) sorted by n
    aperiodic: Scalar

    def __post_init__(self):
        total = sum((m for _, m in self.periods), ZERO) + self.aperiodic
        if total != 1:
            raise AssertionError(f"periodic profile sums to {total}")

    @property
    def is_periodic(self) -> bool:
        return self.aperiodic == 0

    @property
    def is_aperiodic(self) -> bool:
        return self.aperiodic == 1

    @property
    def period_lcm(self) -> int | None:
        if not self.is_periodic:
            return None
        return math.lcm(*(n for n, _ in self.periods))

    def measure_of(self, n: int) -> Scalar:
        if n == 0:
            return self.aperiodic
        return dict(self.periods).get(n, ZERO)


def _profile(parts: dict, aperiodic) -> PeriodicProfile:
    return PeriodicProfile(tuple(sorted((n, m) for n, m in parts.items() if m != 0)), aperiodic)


def periodic_profile(T: System) -> PeriodicProfile:
    if isinstance(T, Power):
        base = periodic_profile(T.base)
        parts: dict = {}
        for n, m in base.periods:
            q = n // math.gcd(n, T.exponent)
            parts[q] = parts.get(q, ZERO) + m
        return _profile(parts, base.aperiodic)
    if isinstance(T, Odometer):
        return _profile({}, Fraction(1))
    if isinstance(T, Rotation):
        if is_rational(T.alpha):
            return _profile({T.alpha.denominator: Fraction(1)}, ZERO)
        return _profile({}, Fraction(1))
    if isinstance(T, FinitePermutation):
        parts = {}
        w = T.space.weights
        for cyc in T.cycles:
            parts[len(cyc)] = parts.get(len(cyc), ZERO) + sum(w[i] for i in cyc)
        return _profile(parts, ZERO)
    if isinstance(T, Product):
        fib = periodic_profile(T.fiber)
        w = T.finite.space.weights
        parts, aper = {}, ZERO
        for cyc in T.finite.cycles:
            cw = sum(w[i] for i in cyc)
            for n, m in fib.periods:
                L = math.lcm(len(cyc), n)
                parts[L] = parts.get(L, ZERO) + cw * m
            aper += cw * fib.aperiodic
        return _profile(parts, aper)
    raise TypeError(f"unknown system {T!r}")


@dataclass(frozen=True)
class ErgodicityVerdict:
    ergodic: bool
    rule: str
    invariant: SetClass | None = None


def _rational_rotation_invariant(alpha: Fraction) -> IntervalSet:
    q = alpha.denominator
    half = Fraction(1, 2 * q)
    return IntervalSet.build(Circle(None), [(Fraction(j, q), Fraction(j, q) + half) for j in range(q)])


def is_ergodic(T: System) -> ErgodicityVerdict:
    """Decide ergodicity by class rule; negative verdicts carry an invariant set."""
    C = _concrete(T)
    if isinstance(C, Power):  # odometer power
        b, k = C.base.base, C.exponent
        g = math.gcd(k, b)
        if g == 1:
            return ErgodicityVerdict(True, f"odometer power: gcd({k},{b}) = 1")
        inv = CylinderSet.from_indices(b, 1, range(0, b, g)).normalize()
        return ErgodicityVerdict(False, f"odometer power: gcd({k},{b}) = {g}", inv)
    if isinstance(C, Odometer):
        return ErgodicityVerdict(True, "odometer")
    if isinstance(C, Rotation):
        if not is_rational(C.alpha):
            return ErgodicityVerdict(True, "irrational rotation")
        inv = _rational_rotation_invariant(C.alpha)
        return ErgodicityVerdict(False, f"rational rotation {C.alpha}", inv)
    if isinstance(C, FinitePermutation):
        cycles = C.cycles
        if len(cycles) == 1:
            return ErgodicityVerdict(True, "single cycle")
        return ErgodicityVerdict(False, f"{len(cycles)} cycles", AtomSet(C.space, sum(1 << i for i in cycles[0])))
    if isinstance(C, Product):
        cycles = C.finite.cycles
        sp = C.space
        if len(cycles) > 1:
            chosen = set(cycles[0])
            fibers = tuple(full(sp.fiber) if i in chosen else empty(sp.fiber) for i in range(sp.size))
            return ErgodicityVerdict(False, f"finite factor has {len(cycles)} cycles", ProductSet(sp, fibers))
        c = len(cycles[0])
        inner = is_ergodic(power(C.fiber, c))
        if inner.ergodic:
            return ErgodicityVerdict(True, f"{c}-cycle times fiber with ergodic {c}-th power")
        # lift an invariant set of fiber**c along the cycle
        fibers = [None] * c
        cur = inner.invariant
        for j, atom in enumerate(cycles[0]):
            fibers[atom] = cur
            cur = _act(C.fiber, cur, 1)
        return ErgodicityVerdict(False, f"fiber {c}-th power not ergodic", ProductSet(sp, tuple(fibers)))
    raise TypeError(f"unknown system {T!r}")


def invariant_set(T: System) -> SetClass | None:
    """A nontrivial invariant set, or None when ``T`` is ergodic."""
    return is_ergodic(T).invariant


def is_totally_ergodic(T: System) -> bool:
    """True when every power ``T**n`` is ergodic."""
    C = _concrete(T)
    if isinstance(C, (Odometer, Power)):
        return False
    if isinstance(C, Rotation):
        return not is_rational(C.alpha)
    if isinstance(C, FinitePermutation):
        return C.space.size == 1
    if isinstance(C, Product):
        return C.finite.space.size == 1 and is_totally_ergodic(C.fiber)
    raise TypeError(f"unknown system {T!r}")


# ---------------------------------------------------------------- saturation


@dataclass(frozen=True)
class Saturation:
    set: SetClass
    stabilized: bool
    steps: int


def forward_saturation(T: System, A: SetClass, m_max: int) -> Saturation:
    """Grow ``U_m = A | T A | ... | T^m A`` until ``T U_m`` is contained in ``U_m``.

    Containment of one further image certifies that ``U_m`` already is the whole
    forward orbit union.
    """
    _check_space(T, A)
    U = A.normalize()
    m = 0
    while True:
        TU = _act(T, U, 1)
        if is_subset(TU, U):
            return Saturation(U, True, m)
        if m >= m_max:
            return Saturation(U, False, m)
        U = U | TU
        m += 1


def full_saturation(T: System, A: SetClass, m_max: int) -> Saturation:
    """Invariant hull ``U_{n in Z} T^n A``, grown in both time directions."""
    _check_space(T, A)
    U = A.normalize()
    m = 0
    while True:
        F = _act(T, U, 1)
        B = _act(T, U, -1)
        if is_subset(F, U) and is_subset(B, U):
            return Saturation(U, True, m)
        if m >= m_max:
            return Saturation(U, False, m)
        U = U | F | B
        m += 1
