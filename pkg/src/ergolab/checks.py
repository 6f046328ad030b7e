"""Property suites: seeded generators plus the acceptance properties, each timed.

A suite returns a :class:`CheckResult`; it passes when every exact comparison
holds and the run fits its time limit.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

from . import oracles
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
    atoms,
    cylinder,
    difference,
    distance,
    empty,
    full,
    interval,
    intersect,
    prefix_cover,
    symdiff,
    union,
)
from .phi import phi, phi_star, wandering_rate
from .probes import (
    _randbelow,
    continuity_probe,
    discontinuity_witness,
    make_rng,
    phi_star_discontinuity_witness,
    random_perturbation,
    rokhlin_tower,
    verify_tower,
)
from .scalars import format_scalar, quadratic
from .systems import (
    FinitePermutation,
    Odometer,
    Product,
    Rotation,
    identity,
    is_ergodic,
    periodic_profile,
    power,
)

__all__ = [
    "CheckResult",
    "SUITES",
    "GROUPS",
    "run_suite",
    "run_group",
    "random_set",
    "random_permutation",
    "golden_rotation",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (limit {self.limit:g}s)" if self.limit else ""
        return f"[{status}] {self.name}: {self.detail} in {self.seconds:.2f}s{budget}"

    def row(self) -> dict:
        return {
            "task": "check",
            "param": self.name,
            "lower": "1" if self.passed else "0",
            "upper": "1" if self.passed else "0",
            "exact": "true",
            "steps": f"{self.seconds:.3f}",
            "certificate": self.detail,
        }


# ---------------------------------------------------------------- generators


def golden_rotation() -> Rotation:
    return Rotation(quadratic(Fraction(-1, 2), Fraction(1, 2), 5))


def random_set(space: Space, rng, max_level: int = 8, max_pieces: int = 4) -> SetClass:
    """Random class on ``space``: cylinder unions up to ``max_level``, dyadic-ish intervals, atom subsets."""
    if isinstance(space, CylinderSpace):
        b = space.base
        level = int(rng.integers(0, max_level + 1))
        return CylinderSet(b, level, _randbelow(rng, 2 ** (b**level))).normalize()
    if isinstance(space, Circle):
        D = int(rng.integers(2, 65))
        pts = sorted({_randbelow(rng, D + 1) for _ in range(2 * int(rng.integers(0, max_pieces + 1)))})
        if len(pts) % 2:
            pts = pts[:-1]
        pieces = [(Fraction(pts[i], D), Fraction(pts[i + 1], D)) for i in range(0, len(pts), 2)]
        return IntervalSet.build(space, pieces)
    if isinstance(space, AtomSpace):
        return AtomSet(space, _randbelow(rng, 2**space.size))
    if isinstance(space, ProductSpace):
        fibers = tuple(random_set(space.fiber, rng, max_level, max_pieces) for _ in range(space.size))
        return ProductSet(space, fibers).normalize()
    raise TypeError(space)


def random_permutation(n: int, rng, weighted: bool = True) -> FinitePermutation:
    """Uniform random permutation; with ``weighted`` each cycle gets its own random weight."""
    perm = [int(x) for x in rng.permutation(n)]
    if not weighted:
        return FinitePermutation.uniform(perm)
    cyc_of = [-1] * n
    cycles = 0
    for s in range(n):
        if cyc_of[s] >= 0:
            continue
        x = s
        while cyc_of[x] < 0:
            cyc_of[x] = cycles
            x = perm[x]
        cycles += 1
    raw = [int(rng.integers(1, 17)) for _ in range(cycles)]
    w = [raw[cyc_of[i]] for i in range(n)]
    total = sum(w)
    return FinitePermutation(AtomSpace(tuple(Fraction(x, total) for x in w)), tuple(perm))


def _timed(name, limit, body) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    if limit is not None and dt >= limit:
        ok = False
        detail += f"; over time limit {limit:g}s"
    return CheckResult(name, ok, detail, dt, limit)


# ---------------------------------------------------------------- suites


def check_lipschitz(seed: int = 0, pairs: int = 1000) -> CheckResult:
    ms = (0, 1, 2, 4, 8, 16, 32)
    rng = make_rng(seed)

    def body():
        systems = [
            Odometer(2),
            Odometer(3),
            Rotation(Fraction(1, 5)),
            random_permutation(64, rng, weighted=False),
            Product(identity(2), Odometer(2)),
        ]
        bad = 0
        for T in systems:
            sp = T.space
            for i in range(pairs):
                A = random_set(sp, rng, max_level=6)
                if i % 2:
                    P = random_perturbation(sp, Fraction(1, 2 ** int(rng.integers(1, 8))), rng)
                    B = A if P is None else A ^ P
                else:
                    B = random_set(sp, rng, max_level=6)
                d = distance(A, B)
                ra, rb = wandering_rate(T, A, ms[-1]), wandering_rate(T, B, ms[-1])
                bad += sum(1 for m in ms if abs(ra[m] - rb[m]) > (m + 1) * d)
        return bad == 0, f"{len(systems) * pairs} pairs x {len(ms)} truncations, {bad} violations"

    return _timed("lipschitz", 30, body)


def _all_unions(b: int, level: int):
    for mask in range(1, 2 ** (b**level)):
        yield CylinderSet(b, level, mask)


def check_ergodicity(seed: int = 0, sample: int = 500) -> CheckResult:
    rng = make_rng(seed)
    T = Odometer(2)

    def body():
        bad, worst, n = 0, 0, 0
        sets = []
        while len(sets) < sample:
            A = random_set(T.space, rng, max_level=8)
            if not A.is_null():
                sets.append(A)
        for A in list(sets) + list(_all_unions(2, 4)):
            r = phi(T, A, 255)
            n += 1
            worst = max(worst, r.steps_used)
            if not (r.exact and r.value == 1 and r.steps_used <= 255):
                bad += 1
        verdict = is_ergodic(T).ergodic
        return bad == 0 and verdict, f"{n} non-null unions, {bad} failures, max stabilization step {worst}"

    return _timed("ergodicity", 20, body)


def _two_atom_product():
    T = Product(identity(2), Odometer(2))
    return T, atoms(T.space, [0])


def check_witness_jump(seed: int = 0) -> CheckResult:
    def body():
        T, A = _two_atom_product()
        r = phi(T, A)
        w = discontinuity_witness(T, A, eps=Fraction(1, 2), n0=32)
        ok = (
            r.exact
            and r.value == Fraction(1, 2)
            and w.distance <= Fraction(1, 64)
            and w.jump > Fraction(1, 4)
        )
        return ok, (
            f"phi(A) = {format_scalar(r.lower)}, d(A,C) = {format_scalar(w.distance)}, "
            f"jump = {format_scalar(w.jump)} > 1/4"
        )

    return _timed("witness-jump", 5, body)


def check_ergodic_probes(seed: int = 0, points: int = 6) -> CheckResult:
    """Ergodic fixtures: zero jumps at non-null points; non-ergodic aperiodic fixtures: a witness."""
    rng = make_rng(seed)
    radii = (Fraction(1, 8), Fraction(1, 64))

    def body():
        bad = []
        for T in (Odometer(2), Odometer(3), golden_rotation()):
            for _ in range(points):
                A = random_set(T.space, rng, max_level=5)
                if A.is_null():
                    continue
                rep = continuity_probe(T, A, radii, samples_per_radius=6, seed=int(rng.integers(1 << 30)))
                if any(row.sup_jump != 0 or not row.exact for row in rep.rows):
                    bad.append(f"{T!r} jump at {A!r}")
        for T in (Product(identity(2), Odometer(2)), Product(identity(3), Odometer(3))):
            A = atoms(T.space, [0])
            w = discontinuity_witness(T, A)
            if not w.jump > w.guarantee > 0:
                bad.append(f"{T!r} weak witness")
        return not bad, "; ".join(bad) or "ergodic fixtures jump-free, non-ergodic fixtures witnessed"

    return _timed("ergodic-probes", 60, body)


def check_null_point(seed: int = 0) -> CheckResult:
    radii = (Fraction(1, 4), Fraction(1, 16), Fraction(1, 256))

    def body():
        T = Odometer(2)
        rep = continuity_probe(T, empty(T.space), radii, samples_per_radius=8, seed=seed)
        ok = all(r.exact and r.sup_jump == 1 for r in rep.rows) and rep.verdict == "discontinuity-witnessed"
        jumps = ", ".join(format_scalar(r.sup_jump) for r in rep.rows)
        return ok, f"jumps {jumps} at radii 1/4, 1/16, 1/256; {rep.verdict}"

    return _timed("null-point", 30, body)


def check_periodic(seed: int = 0, perms: int = 50, samples: int = 6) -> CheckResult:
    rng = make_rng(seed)
    radii = (Fraction(1, 32), Fraction(1, 128))

    def body():
        bad = []
        cases = []
        for q in range(2, 65):
            p = int(rng.integers(1, q))
            while math.gcd(p, q) != 1:
                p = int(rng.integers(1, q))
            cases.append((Rotation(Fraction(p, q)), q, q - 1))
        for _ in range(perms):
            T = random_permutation(int(rng.integers(1, 257)), rng)
            L = periodic_profile(T).period_lcm
            cases.append((T, L, max(len(c) for c in T.cycles) - 1))
        for T, L, bound in cases:
            A = random_set(T.space, rng)
            r = phi(T, A)
            if not (r.exact and r.steps_used <= bound):
                bad.append(f"{T!r}: stabilized at {r.steps_used} > {bound}")
            rep = continuity_probe(T, A, radii, samples_per_radius=samples, seed=int(rng.integers(1 << 30)), witness=False)
            for row in rep.rows:
                if not row.exact or row.sup_jump > L * row.radius:
                    bad.append(f"{T!r}: jump {format_scalar(row.sup_jump)} at radius {format_scalar(row.radius)}")
        return not bad, f"{len(cases)} periodic systems, {len(bad)} violations" + ("; " + bad[0] if bad else "")

    return _timed("periodic", 60, body)


def check_phi_star(seed: int = 0) -> CheckResult:
    T = Odometer(2)

    def body():
        bad = []
        for level in range(1, 7):
            for w in oracles.words(2, level):
                A = cylinder(2, w)
                r, _ = phi_star(T, A, exponent_budget=64)
                brute = min(oracles.odometer_power_phi(2, [w], m) for m in range(1, 65))
                target = Fraction(1, 2**level)
                if not (r.exact and r.value == target == brute):
                    bad.append(f"{w}: {format_scalar(r.lower)} vs brute {format_scalar(brute)}")
                if level <= 5 and r.attained_at != 2**level:
                    bad.append(f"{w}: attained at {r.attained_at}")
        A = cylinder(2, "0")
        whole, _ = phi(T, A), None
        if not (whole.exact and whole.value == 1):
            bad.append("phi(cyl 0) != 1")
        wit = phi_star_discontinuity_witness(T, A, Fraction(1, 16), [2, 4, 8])
        jumps = [j for _, _, _, j in wit.per_exponent]
        if not (all(j == Fraction(1, 2) for j in jumps) and wit.distance < Fraction(1, 16)):
            bad.append(f"witness jumps {jumps}")
        detail = f"126 cylinders up to level 6, witness d = {format_scalar(wit.distance)}, jumps " + ", ".join(
            format_scalar(j) for j in jumps
        )
        return not bad, "; ".join(bad) or detail

    return _timed("phi-star", 60, body)


def check_tower(seed: int = 0) -> CheckResult:
    epss = (Fraction(1, 4), Fraction(1, 16), Fraction(1, 1024))

    def body():
        bad, n = [], 0
        for b in (2, 3):
            T = Odometer(b)
            for n0 in range(1, 33):
                for eps in epss:
                    tower = rokhlin_tower(T, full(T.space), n0, eps)
                    E = tower.base
                    disjoint, cover = oracles.tower_check(b, E.level, list(E.indices), n0)
                    ok2, cover2 = verify_tower(T, tower)
                    n += 1
                    if not (disjoint and ok2 and cover == cover2 and cover > 1 - eps):
                        bad.append(f"b={b} n0={n0} eps={format_scalar(eps)}")
        return not bad, f"{n} towers, {len(bad)} violations" + ("; " + bad[0] if bad else "")

    return _timed("tower", 30, body)


def _words_of(s: CylinderSet, level: int) -> frozenset:
    return oracles.cyl_words(s.base, level, prefix_cover(s))


def check_oracle(seed: int = 0, systems: int = 200, pairs: int = 200) -> CheckResult:
    rng = make_rng(seed)

    def body():
        bad = []
        for _ in range(systems):
            T = random_permutation(int(rng.integers(1, 513)), rng)
            A = random_set(T.space, rng)
            members = A.members
            r = phi(T, A)
            if not (r.exact and r.value == oracles.perm_phi(T.perm, T.space.weights, members)):
                bad.append(f"phi on n={len(T.perm)}")
            if wandering_rate(T, A, 6) != oracles.perm_rates(T.perm, T.space.weights, members, 6):
                bad.append(f"truncated rates on n={len(T.perm)}")
        ops = {"union": union, "intersect": intersect, "symdiff": symdiff, "difference": difference}
        for _ in range(pairs):
            b = int(rng.integers(2, 4))
            L = int(rng.integers(0, 13 if b == 2 else 8))
            prefixes = []
            for _ in range(2):
                k = int(rng.integers(0, 9))
                prefixes.append(
                    ["".join(str(int(d)) for d in rng.integers(0, b, int(rng.integers(0, L + 1)))) for _ in range(k)]
                )
            X = [oracles.cyl_words(b, L, ps) for ps in prefixes]
            S = []
            for ps in prefixes:
                s = empty(CylinderSpace(b))
                for p in ps:
                    s = s | cylinder(b, p)
                S.append(s)
            want = oracles.word_ops(b, L, X[0], X[1])
            for name, f in ops.items():
                if _words_of(f(S[0], S[1]), L) != want[name]:
                    bad.append(f"{name} at base {b} level {L}")
            if _words_of(~S[0], L) != want["complement"]:
                bad.append(f"complement at base {b} level {L}")
            if S[0].measure() != oracles.word_measure(b, L, X[0]):
                bad.append(f"measure at base {b} level {L}")
        return not bad, f"{systems} permutation systems, {pairs} cylinder pairs, {len(bad)} mismatches" + (
            "; " + bad[0] if bad else ""
        )

    return _timed("oracle", 60, body)


def check_totally_ergodic(seed: int = 0) -> CheckResult:
    def body():
        T = golden_rotation()
        A = interval(0, Fraction(1, 10), field=5)
        bad = []
        steps = []
        for k in range(1, 17):
            r = phi(power(T, k), A, 100)
            steps.append(r.steps_used)
            if not (r.exact and r.value == 1 and r.steps_used <= 100):
                bad.append(f"k={k}")
        rs, _ = phi_star(T, A)
        if not (rs.exact and rs.value == 1):
            bad.append("phi_star != 1")
        rng = make_rng(seed)
        for target in ("phi", "phi_star"):
            for _ in range(3):
                P = random_set(T.space, rng)
                if P.is_null():
                    continue
                rep = continuity_probe(T, P, (Fraction(1, 16), Fraction(1, 256)), 4, seed, target=target, witness=False)
                if any(row.sup_jump != 0 for row in rep.rows):
                    bad.append(f"{target} jump at {P!r}")
        return not bad, "; ".join(bad) or f"phi = 1 for powers 1..16, stabilization steps <= {max(steps)}; phi* = 1"

    return _timed("totally-ergodic", 60, body)


SUITES = {
    "lipschitz": check_lipschitz,
    "ergodicity": check_ergodicity,
    "witness-jump": check_witness_jump,
    "ergodic-probes": check_ergodic_probes,
    "null-point": check_null_point,
    "periodic": check_periodic,
    "phi-star": check_phi_star,
    "tower": check_tower,
    "oracle": check_oracle,
    "totally-ergodic": check_totally_ergodic,
}

GROUPS = {
    "tm1-suite": ("ergodicity", "witness-jump", "null-point", "ergodic-probes"),
    "acceptance": (
        "lipschitz",
        "ergodicity",
        "witness-jump",
        "null-point",
        "periodic",
        "phi-star",
        "tower",
        "oracle",
        "totally-ergodic",
    ),
    "all": tuple(SUITES),
}


def run_suite(name: str, seed: int = 0) -> CheckResult:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed=seed)


def run_group(name: str, seed: int = 0) -> list[CheckResult]:
    names = GROUPS.get(name, (name,))
    return [run_suite(n, seed) for n in names]
