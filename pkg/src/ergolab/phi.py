"""Wandering-rate maps: the truncated rates, their limit, and the infimum over powers.

For a set ``A`` the truncated rate at ``m`` is the measure of the union of the
first ``m + 1`` images of ``A``; the limit is the measure of the whole forward
orbit union.  The limit is reported exactly only when the union provably
stops growing, otherwise as a bracket.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    AtomSet,
    CylinderSet,
    IntervalSet,
    ProductSet,
    SetClass,
    ZERO,
    full,
)
from .errors import CapabilityError
from .scalars import Scalar, format_scalar, is_rational
from .systems import (
    FinitePermutation,
    Odometer,
    Power,
    Product,
    Rotation,
    System,
    _act,
    _check_space,
    _concrete,
    forward_saturation,
    is_ergodic,
    is_totally_ergodic,
    power,
)

__all__ = [
    "DEFAULT_M_MAX",
    "DEFAULT_EXPONENT_BUDGET",
    "PhiResult",
    "ErgodicPowerProfile",
    "phi_m",
    "wandering_rate",
    "phi",
    "phi_star",
    "ergodic_power_profile",
    "ergodic_decomposition",
]

DEFAULT_M_MAX = 4096
DEFAULT_EXPONENT_BUDGET = 64


@dataclass(frozen=True)
class PhiResult:
    lower: Scalar
    upper: Scalar
    exact: bool
    steps_used: int
    certificate: str
    attained_at: int | None = None

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper <= 1):
            raise AssertionError(f"bad bracket [{self.lower}, {self.upper}]")
        if self.exact != (self.lower == self.upper):
            raise AssertionError("exact flag must match a degenerate bracket")

    @property
    def value(self) -> Scalar:
        if not self.exact:
            raise ValueError("value is only bracketed")
        return self.lower

    def row(self, task: str, param: str = "") -> dict:
        return {
            "task": task,
            "param": param,
            "lower": format_scalar(self.lower),
            "upper": format_scalar(self.upper),
            "exact": "true" if self.exact else "false",
            "steps": str(self.steps_used),
            "certificate": self.certificate,
        }


def wandering_rate(T: System, A: SetClass, m: int) -> list[Scalar]:
    """Truncated rates for ``0..m`` in one pass."""
    _check_space(T, A)
    U = A.normalize()
    out = [U.measure()]
    while len(out) <= m:
        TU = _act(T, U, 1)
        grown = U | TU
        if grown == U:
            # forward invariant: the rate is constant from here on
            out.extend([out[-1]] * (m + 1 - len(out)))
            break
        U = grown
        out.append(U.measure())
    return out


def phi_m(T: System, A: SetClass, m: int) -> Scalar:
    """Measure of ``A | T A | ... | T^m A``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return wandering_rate(T, A, m)[m]


def phi(T: System, A: SetClass, m_max: int = DEFAULT_M_MAX) -> PhiResult:
    sat = forward_saturation(T, A, m_max)
    value = sat.set.measure()
    if sat.stabilized:
        return PhiResult(value, value, True, sat.steps, f"stabilized at m={sat.steps}")
    if value == 1:
        return PhiResult(value, value, True, sat.steps, f"full measure reached at m={sat.steps}")
    return PhiResult(value, Fraction(1), False, sat.steps, f"budget exhausted at m={sat.steps}")


# ---------------------------------------------------------------- powers


@dataclass(frozen=True)
class ErgodicPowerProfile:
    k0: int | None
    K: tuple
    kappa: int | None
    budget: int
    non_ergodic: tuple = field(default=(), repr=False)


def ergodic_power_profile(T: System, budget: int = DEFAULT_EXPONENT_BUDGET) -> ErgodicPowerProfile:
    """Non-ergodic exponents up to ``budget`` and their divisibility-minimal generators.

    ``K`` holds the non-ergodic exponents not divisible by a smaller one; every
    non-ergodic exponent is a multiple of some member of ``K``.
    """
    bad = tuple(m for m in range(1, budget + 1) if not is_ergodic(power(T, m)).ergodic)
    K = []
    for m in bad:
        if not any(m % k == 0 for k in K):
            K.append(m)
    kappa = math.prod(K) if K else None
    return ErgodicPowerProfile(bad[0] if bad else None, tuple(K), kappa, budget, bad)


def _exploration_order(bad: tuple, budget: int) -> list[int]:
    """Non-ergodic exponents, each followed by its doubling chain."""
    bad_set = set(bad)
    seen: set[int] = set()
    order = []
    for m in bad:
        j = m
        while j <= budget:
            if j in bad_set and j not in seen:
                seen.add(j)
                order.append(j)
            j *= 2
    return order


def phi_star(
    T: System,
    A: SetClass,
    exponent_budget: int = DEFAULT_EXPONENT_BUDGET,
    m_max: int = DEFAULT_M_MAX,
) -> tuple[PhiResult, ErgodicPowerProfile]:
    """Infimum over powers ``T**m`` of the limit rate of ``A``.

    Ergodic powers are skipped (their rate is 1 off the null class).  Since no
    rate falls below ``measure(A)``, meeting an exponent that fixes ``A``
    settles the infimum exactly.
    """
    _check_space(T, A)
    A = A.normalize()
    profile = ergodic_power_profile(T, exponent_budget)
    mu = A.measure()
    if A.is_null():
        return PhiResult(ZERO, ZERO, True, 0, "null class"), profile
    if is_totally_ergodic(T):
        one = Fraction(1)
        return PhiResult(one, one, True, 0, "every power ergodic by class rule"), profile
    best = Fraction(1)
    best_at = None
    steps = 0
    for m in _exploration_order(profile.non_ergodic, exponent_budget):
        Tm = power(T, m)
        if _act(Tm, A, 1) == A:
            return PhiResult(mu, mu, True, steps, f"invariant under T^{m}", attained_at=m), profile
        r = phi(Tm, A, m_max)
        steps += r.steps_used
        if r.upper < best:
            best, best_at = r.upper, m
    if best == mu:
        return PhiResult(mu, mu, True, steps, f"measure attained at T^{best_at}", attained_at=best_at), profile
    where = f" (min at T^{best_at})" if best_at else ""
    return (
        PhiResult(mu, best, False, steps, f"bracket over exponents <= {exponent_budget}{where}", attained_at=best_at),
        profile,
    )


# ---------------------------------------------------------------- decomposition


def _b_part(k: int, b: int) -> int:
    """Largest divisor of ``k`` whose prime factors all divide ``b``."""
    out = 1
    g = math.gcd(k, b)
    while g > 1:
        out *= g
        k //= g
        g = math.gcd(k, b)
    return out


def _odometer_power_components(b: int, k: int) -> list[SetClass]:
    # the closure of k*Z in the b-adic integers is k'*Z_b with k' the b-part of k
    kp = _b_part(k, b)
    level = 0
    while b**level % kp:
        level += 1
    W = b**level
    return [CylinderSet.from_indices(b, level, range(r, W, kp)).normalize() for r in range(kp)]


def ergodic_decomposition(T: System, granularity: int | None = None) -> list[tuple[SetClass, Scalar]]:
    """Disjoint invariant pieces of positive measure covering the space.

    For every class except rational rotations each piece carries an ergodic
    restriction.  A rational rotation ``p/q`` has only measure-zero ergodic
    components (its finite orbits), so it is reported as the invariant family
    obtained by cutting ``[0, 1/q)`` into ``granularity`` equal pieces (default
    ``q``) and sweeping each piece around its orbit.
    """
    C = _concrete(T)
    if isinstance(C, Power):
        parts = _odometer_power_components(C.base.base, C.exponent)
    elif isinstance(C, Odometer):
        parts = [full(C.space)]
    elif isinstance(C, Rotation):
        if not is_rational(C.alpha):
            parts = [full(C.space)]
        else:
            q = C.alpha.denominator
            g = granularity or q
            w = Fraction(1, q * g)
            parts = [
                IntervalSet.build(C.space, [(Fraction(t, q) + j * w, Fraction(t, q) + (j + 1) * w) for t in range(q)])
                for j in range(g)
            ]
    elif isinstance(C, FinitePermutation):
        parts = [AtomSet(C.space, sum(1 << i for i in cyc)) for cyc in C.cycles]
    elif isinstance(C, Product):
        parts = []
        sp = C.space
        for cyc in C.finite.cycles:
            for comp, _ in ergodic_decomposition(power(C.fiber, len(cyc)), granularity):
                fibers = [None] * sp.size
                cur = comp
                for atom in cyc:
                    fibers[atom] = cur
                    cur = _act(C.fiber, cur, 1)
                empty_fiber = comp - comp
                fibers = [f if f is not None else empty_fiber for f in fibers]
                parts.append(ProductSet(sp, tuple(fibers)))
    else:
        raise CapabilityError(f"not decomposable by this artifact: {T!r}")
    return [(p, p.measure()) for p in parts]
