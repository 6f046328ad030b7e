"""Continuity probing of the rate maps, Rokhlin towers and discontinuity witnesses.

A probe can never prove continuity; it samples nearby sets and reports the
largest observed change.  Discontinuity, in contrast, is certified by an
explicit witness: a set within the requested radius whose rate exceeds the
rate at the probed point by a stated positive margin.

Randomness comes from numpy's counter-based Philox generator keyed by a single
integer seed, so every report is reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

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
    distance,
    empty,
    fiber_set,
    format_set,
    full,
)
from .errors import BudgetError, CapabilityError, PreconditionError
from .phi import (
    DEFAULT_EXPONENT_BUDGET,
    DEFAULT_M_MAX,
    PhiResult,
    ergodic_decomposition,
    ergodic_power_profile,
    phi,
    phi_star,
)
from .scalars import Scalar, as_scalar, floor, frac, format_scalar, is_rational
from .systems import (
    Odometer,
    Product,
    Rotation,
    System,
    _act,
    _check_space,
    _concrete,
    full_saturation,
    is_ergodic,
    is_totally_ergodic,
    periodic_profile,
    power,
)

__all__ = [
    "RokhlinTower",
    "Witness",
    "PhiStarWitness",
    "RadiusRow",
    "ProbeReport",
    "make_rng",
    "rokhlin_tower",
    "verify_tower",
    "discontinuity_witness",
    "continuity_probe",
    "phi_star_discontinuity_witness",
    "random_perturbation",
    "small_subset",
    "PROBE_SCHEMA",
]

PROBE_SCHEMA = "ergolab.probe/1"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _randbelow(rng: np.random.Generator, n: int) -> int:
    if n <= 1 << 62:
        return int(rng.integers(0, n))
    nbytes = (n.bit_length() + 7) // 8 + 8
    return int.from_bytes(rng.bytes(nbytes), "little") % n


# ---------------------------------------------------------------- towers


@dataclass(frozen=True)
class RokhlinTower:
    base: SetClass
    height: int
    residual_measure: Scalar
    region: SetClass

    def floors(self, T: System) -> list[SetClass]:
        return [_act(T, self.base, k) for k in range(self.height)]


def verify_tower(T: System, tower: RokhlinTower) -> tuple[bool, Scalar]:
    """Recheck disjointness of the floors with set algebra; return (disjoint, covered measure)."""
    covered = empty(tower.region.space)
    ok = (tower.base - tower.region).is_null()
    for level in tower.floors(T):
        if not (level & covered).is_null() or not (level - tower.region).is_null():
            ok = False
        covered = covered | level
    return ok, covered.measure()


def _odometer_tower_base(b: int, n0: int, eps: Scalar) -> CylinderSet:
    l = 0
    while Fraction(n0, b**l) > eps:
        l += 1
    W = b**l
    return CylinderSet.from_indices(b, l, range(0, n0 * (W // n0), n0)).normalize()


def _convergents(alpha: Scalar):
    """Yield (p, q) convergents of ``alpha`` in order, starting with p_{-1}/q_{-1} = 1/0."""
    p0, q0, p1, q1 = 1, 0, floor(alpha), 1
    yield p0, q0
    yield p1, q1
    x = alpha - floor(alpha)
    while x != 0:
        x = 1 / x
        a = floor(x)
        x = x - a
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield p1, q1


def _orbit_of_interval(T: Rotation, lo: Scalar, length: Scalar, count: int, step: int = 1) -> IntervalSet:
    """Union of ``T^(step*j) [lo, lo+length)`` for ``0 <= j < count``, built in one merge."""
    pieces = []
    for j in range(count):
        l = frac(lo + j * step * T.alpha)
        r = l + length
        if r <= 1:
            pieces.append((l, r))
        else:
            pieces.append((l, Fraction(1)))
            pieces.append((ZERO, r - 1))
    return IntervalSet.build(T.space, pieces)


def _rotation_tower_base(T: Rotation, n0: int, eps: Scalar) -> IntervalSet:
    # Two-tower partition at consecutive convergent denominators q' < q: the q
    # translates of [0, ||q' alpha||) are disjoint, and the rest of the circle
    # is a second tower of height q' over an interval of length ||q alpha||.
    # Both towers are cut into columns of height n0.
    alpha = T.alpha
    prev = None
    for p, q in _convergents(alpha):
        if prev is not None and prev[1] >= 1 and q >= n0:
            pp, qp = prev
            d1 = abs(qp * alpha - pp)
            d2 = abs(q * alpha - p)
            tall = _orbit_of_interval(T, ZERO, d1, q)
            rest = ~tall
            parts = [_orbit_of_interval(T, ZERO, d1, q // n0, n0)]
            if not rest.is_null():
                low = rest - _act(T, rest, 1)
                if low.measure() != d2 or qp * d2 != rest.measure():
                    raise AssertionError("second tower does not have the expected shape")
                l0, r0 = low.intervals[0]
                if len(low.intervals) > 1:
                    l0 = low.intervals[-1][0]  # the base wraps through 0
                parts.append(_orbit_of_interval(T, l0, d2, qp // n0, n0))
            E = parts[0] if len(parts) == 1 else parts[0] | parts[1]
            if 1 - n0 * E.measure() < eps:
                return E
        prev = (p, q)
    raise AssertionError("convergent sequence ended for an irrational rotation")


def _fiber_tower_base(S: System, n0: int, eps: Scalar) -> SetClass:
    C = _concrete(S)
    if isinstance(C, Odometer):
        return _odometer_tower_base(C.base, n0, eps)
    if isinstance(C, Rotation) and not is_rational(C.alpha):
        return _rotation_tower_base(C, n0, eps)
    raise CapabilityError(f"no tower construction for {S!r}")


def rokhlin_tower(T: System, region: SetClass, n0: int, eps) -> RokhlinTower:
    """Base ``E`` inside an invariant ``region`` whose first ``n0`` images are disjoint.

    The floors cover all of ``region`` except a part of measure less than
    ``eps * measure(region)``.
    """
    eps = as_scalar(eps)
    if n0 < 1:
        raise PreconditionError("tower height must be >= 1")
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    _check_space(T, region)
    region = region.normalize()
    if region.is_null():
        raise PreconditionError("tower region is null")
    if _act(T, region, 1) != region:
        raise PreconditionError("tower region must be invariant")
    if not periodic_profile(T).is_aperiodic:
        raise PreconditionError("the restriction to the region has a periodic part")
    C = _concrete(T)
    if isinstance(C, Product):
        sp = C.space
        fib_full, fib_empty = full(sp.fiber), empty(sp.fiber)
        if any(f != fib_full and f != fib_empty for f in region.fibers):
            raise CapabilityError("product regions must be unions of whole fibers")
        e = _fiber_tower_base(C.fiber, n0, eps)
        base = ProductSet(sp, tuple(e if f == fib_full else fib_empty for f in region.fibers))
    else:
        if region != full(T.space):
            raise CapabilityError("towers are built on the whole space for this class")
        base = _fiber_tower_base(C, n0, eps)
    mu_region = region.measure()
    covered = n0 * base.measure()
    tower = RokhlinTower(base, n0, mu_region - covered, region)
    if not tower.residual_measure < eps * mu_region:
        raise AssertionError("tower construction missed its coverage target")
    return tower


# ---------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class Witness:
    point: SetClass
    C: SetClass
    distance: Scalar
    jump: Scalar
    guarantee: Scalar
    n0: int
    eps: Scalar

    def to_dict(self) -> dict:
        return {
            "point": format_set(self.point),
            "set": format_set(self.C),
            "distance": format_scalar(self.distance),
            "jump": format_scalar(self.jump),
            "guarantee": format_scalar(self.guarantee),
            "n0": self.n0,
            "eps": format_scalar(self.eps),
        }


def _default_height(mass: Scalar, radius: Scalar | None) -> int:
    if radius is None:
        return 8
    n0 = 1
    while not mass / n0 < radius:
        n0 *= 2
    return n0


def discontinuity_witness(
    T: System,
    A: SetClass,
    eps=Fraction(1, 2),
    n0: int | None = None,
    radius=None,
    m_max: int = DEFAULT_M_MAX,
) -> Witness:
    """Set ``C = A | E`` near ``A`` whose limit rate jumps by more than ``(1 - eps) * mu(R)``.

    ``R`` is the complement of the invariant hull of ``A`` and ``E`` the base of
    a tower filling ``R``.  Raises PreconditionError at continuity points (rate 1).
    """
    eps = as_scalar(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise PreconditionError("eps must lie in (0, 1/2]")
    if not periodic_profile(T).is_aperiodic:
        raise PreconditionError("the system is not aperiodic")
    A = A.normalize()
    rA = phi(T, A, m_max)
    if not rA.exact:
        raise BudgetError("the rate at the point is not certified within the budget")
    if rA.value == 1:
        raise PreconditionError("point is continuous: its rate is 1")
    hull = full_saturation(T, A, m_max)
    if not hull.stabilized:
        raise BudgetError("invariant hull did not stabilize within the budget")
    R = ~hull.set
    mass = R.measure()
    if radius is not None:
        radius = as_scalar(radius)
    if n0 is None:
        n0 = _default_height(mass, radius)
    tower = rokhlin_tower(T, R, n0, eps)
    C = A | tower.base
    rC = phi(T, C, m_max)
    if not rC.exact:
        raise BudgetError("the rate at the witness is not certified within the budget")
    w = Witness(A, C, distance(A, C), rC.value - rA.value, (1 - eps) * mass, n0, eps)
    if not w.jump > w.guarantee:
        raise AssertionError("witness failed its guaranteed jump")
    return w


def small_subset(S: SetClass, cap) -> SetClass:
    """Deterministic subset of ``S`` with measure in ``(0, cap)``: the first deep piece."""
    cap = as_scalar(cap)
    S = S.normalize()
    if S.is_null():
        raise PreconditionError("cannot take a piece of a null set")
    if isinstance(S, CylinderSet):
        L = S.level
        while not Fraction(1, S.base**L) < cap:
            L += 1
        fine = S.refine(L)
        low = fine.mask & -fine.mask
        return CylinderSet(S.base, L, low).normalize()
    if isinstance(S, IntervalSet):
        l, r = S.intervals[0]
        w = Fraction(1)
        while not (w < cap and w <= r - l):
            w /= 2
        return IntervalSet.build(S.space, [(l, l + w)])
    if isinstance(S, AtomSet):
        ws = S.space.weights
        ok = [i for i in S.members if ws[i] < cap]
        if not ok:
            raise CapabilityError("every atom of the set is heavier than the allowed piece")
        return AtomSet(S.space, 1 << min(ok, key=lambda i: (ws[i], i)))
    if isinstance(S, ProductSet):
        for i, f in enumerate(S.fibers):
            if not f.is_null():
                return fiber_set(S.space, i, small_subset(f, cap / S.space.weights[i]))
    raise TypeError(S)


@dataclass(frozen=True)
class PhiStarWitness:
    point: SetClass
    B: SetClass
    distance: Scalar
    kappa: int
    guarantee: Scalar
    # (exponent, rate of the point, rate of B, jump)
    per_exponent: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "point": format_set(self.point),
            "set": format_set(self.B),
            "distance": format_scalar(self.distance),
            "kappa": self.kappa,
            "guarantee": format_scalar(self.guarantee),
            "per_exponent": [
                {"m": m, "phi_point": format_scalar(a), "phi_set": format_scalar(b), "jump": format_scalar(j)}
                for m, a, b, j in self.per_exponent
            ],
        }


def phi_star_discontinuity_witness(
    T: System,
    A: SetClass,
    delta,
    exponents: Sequence[int],
    exponent_budget: int = DEFAULT_EXPONENT_BUDGET,
    m_max: int = DEFAULT_M_MAX,
) -> PhiStarWitness:
    """``B = A | E_1 | E_2 | ...`` with ``mu(E_r) < delta / 2**r``, one piece per listed exponent.

    ``E_r`` puts one small piece inside every ergodic component of ``T**m_r``
    that meets the complement of ``A``, so ``B`` sweeps that complement under
    ``T**m_r`` while ``A`` stays put.
    """
    delta = as_scalar(delta)
    _check_space(T, A)
    A = A.normalize()
    mu = A.measure()
    if not 0 < mu < 1:
        raise PreconditionError("the point must have measure strictly between 0 and 1")
    if not exponents:
        raise PreconditionError("no exponents to witness")
    if not periodic_profile(T).is_aperiodic:
        raise PreconditionError("the system is not aperiodic")
    profile = ergodic_power_profile(T, max(exponent_budget, max(exponents)))
    if profile.kappa is None:
        raise PreconditionError("no non-ergodic power within the budget, so no kappa")
    if _act(T, A, profile.kappa) != A:
        raise PreconditionError(f"the point is not invariant under T^{profile.kappa}")
    R = ~A
    B = A
    for rank, m in enumerate(exponents, start=1):
        Tm = power(T, m)
        if is_ergodic(Tm).ergodic:
            raise PreconditionError(f"T^{m} is ergodic; its rate cannot jump at this point")
        targets = [c & R for c, _ in ergodic_decomposition(Tm)]
        targets = [t for t in targets if not t.is_null()]
        cap = delta / 2**rank / len(targets)
        for t in targets:
            B = B | small_subset(t, cap)
    d = distance(A, B)
    if not d < delta:
        raise AssertionError("witness left the requested radius")
    guarantee = R.measure() / 2
    rows = []
    for m in exponents:
        Tm = power(T, m)
        ra, rb = phi(Tm, A, m_max), phi(Tm, B, m_max)
        if not (ra.exact and rb.exact):
            raise BudgetError(f"rates under T^{m} not certified within the budget")
        rows.append((m, ra.value, rb.value, rb.value - ra.value))
    return PhiStarWitness(A, B, d, profile.kappa, guarantee, tuple(rows))


# ---------------------------------------------------------------- probing


def _random_piece(space: Space, cap: Scalar, rng) -> SetClass | None:
    if isinstance(space, CylinderSpace):
        b, L = space.base, 0
        while Fraction(1, b**L) > cap:
            L += 1
        return CylinderSet(b, L, 1 << _randbelow(rng, b**L)).normalize()
    if isinstance(space, Circle):
        L = 0
        while Fraction(1, 2**L) > cap:
            L += 1
        t = _randbelow(rng, 2**L)
        return IntervalSet.build(space, [(Fraction(t, 2**L), Fraction(t + 1, 2**L))])
    if isinstance(space, AtomSpace):
        ok = [i for i, w in enumerate(space.weights) if w <= cap]
        if not ok:
            return None
        return AtomSet(space, 1 << ok[_randbelow(rng, len(ok))])
    if isinstance(space, ProductSpace):
        i = _randbelow(rng, space.size)
        piece = _random_piece(space.fiber, cap / space.weights[i], rng)
        return None if piece is None else fiber_set(space, i, piece)
    raise TypeError(space)


def random_perturbation(space: Space, delta, rng) -> SetClass | None:
    """Random set of measure in ``(0, delta)`` built from one to seven pieces of size at most ``delta/8``.

    Atom spaces whose atoms are all heavier than ``delta/8`` fall back to one
    atom lighter than ``delta``; None means no perturbation fits the radius.
    """
    delta = as_scalar(delta)
    count = int(rng.integers(1, 8))
    P = None
    for _ in range(count):
        piece = _random_piece(space, delta / 8, rng)
        if piece is None:
            break
        P = piece if P is None else P | piece
    if P is None and isinstance(space, AtomSpace):
        ok = [i for i, w in enumerate(space.weights) if w < delta]
        if ok:
            P = AtomSet(space, 1 << ok[_randbelow(rng, len(ok))])
    return P


@dataclass(frozen=True)
class RadiusRow:
    radius: Scalar
    sup_jump: Scalar
    exact: bool
    samples: int
    bracketed: int

    def to_dict(self) -> dict:
        return {
            "radius": format_scalar(self.radius),
            "sup_jump": format_scalar(self.sup_jump),
            "exact": self.exact,
            "samples": self.samples,
            "bracketed": self.bracketed,
        }


@dataclass(frozen=True)
class ProbeReport:
    point: SetClass
    target: str
    value: PhiResult
    rows: tuple
    witness: Witness | None
    verdict: str
    seed: int
    notes: tuple = ()

    @property
    def radii(self) -> list:
        return [r.radius for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "schema": PROBE_SCHEMA,
            "point": format_set(self.point),
            "target": self.target,
            "value": self.value.row(self.target),
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
            "witness": None if self.witness is None else self.witness.to_dict(),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list[dict]:
        """Rows in the shared report schema: one per radius, then a flagged witness row."""
        out = []
        for r in self.rows:
            s = format_scalar(r.sup_jump)
            out.append(
                {
                    "task": f"probe-{self.target}",
                    "param": format_scalar(r.radius),
                    "lower": s if r.exact else "0",
                    "upper": s,
                    "exact": "true" if r.exact else "false",
                    "steps": str(r.samples),
                    "certificate": f"sup-jump over {r.samples} samples ({r.bracketed} bracketed)",
                }
            )
        if self.witness is not None:
            w = self.witness
            out.append(
                {
                    "task": "witness",
                    "param": format_scalar(w.distance),
                    "lower": format_scalar(w.jump),
                    "upper": format_scalar(w.jump),
                    "exact": "true",
                    "steps": str(w.n0),
                    "certificate": f"jump > {format_scalar(w.guarantee)}; {self.verdict}",
                }
            )
        return out


def _jump(a: PhiResult, b: PhiResult) -> tuple[Scalar, bool]:
    if a.exact and b.exact:
        return abs(a.value - b.value), True
    return max(a.upper - b.lower, b.upper - a.lower), False


def continuity_probe(
    T: System,
    A: SetClass,
    radii: Sequence,
    samples_per_radius: int = 16,
    seed: int = 0,
    target: str = "phi",
    m_max: int = DEFAULT_M_MAX,
    exponent_budget: int = DEFAULT_EXPONENT_BUDGET,
    witness: bool = True,
) -> ProbeReport:
    """Largest observed change of the rate map within each radius around ``A``.

    ``target`` selects the limit rate (``"phi"``) or its infimum over powers
    (``"phi_star"``).  A discontinuity witness is attempted for ``"phi"`` when
    its preconditions hold; failures to build one are recorded in ``notes``.
    """
    _check_space(T, A)
    A = A.normalize()
    radii = [as_scalar(r) for r in radii]
    if target == "phi":
        f: Callable[[SetClass], PhiResult] = lambda S: phi(T, S, m_max)
    elif target == "phi_star":
        f = lambda S: phi_star(T, S, exponent_budget, m_max)[0]
    else:
        raise ValueError(f"unknown probe target {target!r}")
    rng = make_rng(seed)
    fA = f(A)
    rows = []
    notes = []
    for delta in radii:
        sup, exact, n, bracketed = ZERO, True, 0, 0
        for _ in range(samples_per_radius):
            P = random_perturbation(A.space, delta, rng)
            if P is None:
                break
            B = A ^ P
            if not distance(A, B) < delta:
                raise AssertionError("perturbation escaped its radius")
            j, ex = _jump(fA, f(B))
            n += 1
            if not ex:
                bracketed += 1
                exact = False
            if j > sup:
                sup = j
        if n == 0:
            notes.append(f"no perturbation fits radius {format_scalar(delta)}")
        rows.append(RadiusRow(delta, sup, exact, n, bracketed))
    wit = None
    if witness and radii:
        try:
            if target == "phi":
                wit = discontinuity_witness(T, A, radius=min(radii), m_max=m_max)
            elif A.is_null() and is_totally_ergodic(T):
                # off the null class the map is identically 1, so any nonnull piece jumps by 1
                C = small_subset(full(A.space), min(radii))
                wit = Witness(A, C, C.measure(), f(C).value, Fraction(1, 2), 1, Fraction(1, 2))
            else:
                notes.append("phi_star witnesses need explicit exponents; see phi_star_discontinuity_witness")
        except (PreconditionError, CapabilityError, BudgetError) as exc:
            notes.append(f"no witness: {exc}")
    verdict = "discontinuity-witnessed" if wit is not None else "no-jump-observed"
    return ProbeReport(A, target, fA, tuple(rows), wit, verdict, seed, tuple(notes))
