"""Brute-force reference computations, deliberately independent of the main code paths.

These work point by point on explicit finite models (lists of atoms, sets of
words, residues mod ``N``) and share nothing with the canonical-form algebra
beyond ``fractions.Fraction``.  They are slow and only meant for cross-checks.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

__all__ = [
    "perm_rates",
    "perm_phi",
    "words",
    "cyl_words",
    "word_ops",
    "word_measure",
    "odometer_power_phi",
    "odometer_power_orbits",
    "tower_check",
    "rotation_phi",
]


# ---------------------------------------------------------------- permutations


def perm_rates(perm, weights, members, m):
    """Truncated rates ``0..m`` by checking, for each point, its last ``m`` preimages."""
    n = len(perm)
    inv = [0] * n
    for i, j in enumerate(perm):
        inv[j] = i
    A = set(members)
    out = []
    for k in range(m + 1):
        total = Fraction(0)
        for x in range(n):
            y = x
            for _ in range(k + 1):
                if y in A:
                    total += weights[x]
                    break
                y = inv[y]
        out.append(total)
    return out


def perm_phi(perm, weights, members):
    """Limit rate: total weight of the orbits that meet the set."""
    seen = [False] * len(perm)
    A = set(members)
    total = Fraction(0)
    for s in range(len(perm)):
        if seen[s]:
            continue
        orbit = []
        x = s
        while not seen[x]:
            seen[x] = True
            orbit.append(x)
            x = perm[x]
        if A.intersection(orbit):
            total += sum(weights[y] for y in orbit)
    return total


# ---------------------------------------------------------------- cylinder words


def words(base, level):
    """All words of a level, first digit first."""
    return ["".join(map(str, w)) for w in itertools.product(range(base), repeat=level)]


def cyl_words(base, level, prefixes):
    """Words of ``level`` extending any of ``prefixes`` (each at most ``level`` long)."""
    return frozenset(w for w in words(base, level) if any(w.startswith(p) for p in prefixes))


def word_ops(base, level, X, Y):
    U = frozenset(words(base, level))
    return {
        "union": X | Y,
        "intersect": X & Y,
        "symdiff": X ^ Y,
        "difference": X - Y,
        "complement": U - X,
    }


def word_measure(base, level, X):
    return Fraction(len(X), base**level)


# ---------------------------------------------------------------- odometer


def _index(word, base):
    # first digit least significant; this is where +1 with carry acts
    return sum(int(d) * base**i for i, d in enumerate(word))


def odometer_power_phi(base, prefixes, m, level=None):
    """Limit rate of a cylinder union under the ``m``-th power, by walking ``+m mod base**L``.

    ``L`` is raised until ``base**L`` absorbs every prime power of ``m`` shared
    with ``base``, after which deeper levels give the same answer.
    """
    L = max([len(p) for p in prefixes] + [level or 0])
    while math.gcd(m, base ** (L + 1)) != math.gcd(m, base**L):
        L += 1
    N = base**L
    start = {_index(w, base) for w in cyl_words(base, L, prefixes)}
    covered = set()
    for a in start:
        x = a
        while x not in covered:
            covered.add(x)
            x = (x + m) % N
    return Fraction(len(covered), N)


def odometer_power_orbits(base, m, level):
    """Number of orbits of ``+m`` on ``Z / base**level``, counted by walking."""
    N = base**level
    seen = bytearray(N)
    count = 0
    for s in range(N):
        if seen[s]:
            continue
        count += 1
        x = s
        while not seen[x]:
            seen[x] = 1
            x = (x + m) % N
    return count


def tower_check(base, level, indices, height):
    """Disjointness and coverage of ``height`` odometer floors over level-``level`` indices."""
    N = base**level
    hit = bytearray(N)
    for j in range(height):
        for e in indices:
            x = (e + j) % N
            if hit[x]:
                return False, Fraction(0)
            hit[x] = 1
    return True, Fraction(sum(hit), N)


# ---------------------------------------------------------------- rational rotation


def rotation_phi(p, q, intervals):
    """Limit rate of a union of rational intervals under ``x -> x + p/q``, on a uniform grid."""
    D = q
    for lo, hi in intervals:
        D = math.lcm(D, Fraction(lo).denominator, Fraction(hi).denominator)
    cells = set()
    for lo, hi in intervals:
        cells.update(range(int(lo * D), int(hi * D)))
    shift = p * D // q
    covered = {(c + k * shift) % D for c in cells for k in range(q)}
    return Fraction(len(covered), D)
