"""The metric Boolean algebra of measure classes over the supported spaces.

Every set value is stored in canonical form, so two values denote the same
measure class exactly when they compare equal.  The distance between classes
is the measure of their symmetric difference.

Cylinder sets over ``{0..b-1}^N`` are stored as an integer bitmask over the
``b**level`` cylinders of one level.  A level-``k`` cylinder is indexed by the
little-endian value of its first ``k`` digits (digit 0 least significant), so
the odometer acts on indices as ``+1 mod b**k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .errors import SpaceMismatchError, StructuralError
from .scalars import Scalar, as_scalar, field_of, format_scalar

__all__ = [
    "AtomSpace",
    "CylinderSpace",
    "Circle",
    "ProductSpace",
    "Space",
    "AtomSet",
    "CylinderSet",
    "IntervalSet",
    "ProductSet",
    "SetClass",
    "cylinder",
    "interval",
    "atoms",
    "empty",
    "full",
    "normalize",
    "union",
    "intersect",
    "complement",
    "symdiff",
    "difference",
    "measure",
    "distance",
    "is_null",
    "is_subset",
    "format_set",
]

ONE = Fraction(1)
ZERO = Fraction(0)


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class AtomSpace:
    """Finitely many atoms with strictly positive rational weights summing to 1."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        if not ws:
            raise StructuralError("an atom space needs at least one atom")
        if any(w <= 0 for w in ws):
            raise StructuralError("atom weights must be strictly positive")
        if sum(ws) != 1:
            raise StructuralError(f"atom weights sum to {sum(ws)}, not 1")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def uniform(cls, n: int) -> "AtomSpace":
        return cls((Fraction(1, n),) * n)

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class CylinderSpace:
    """One-sided sequences over ``{0..base-1}`` with the uniform Bernoulli measure."""

    base: int

    def __post_init__(self):
        if not isinstance(self.base, int) or self.base < 2:
            raise StructuralError(f"cylinder base must be an integer >= 2, got {self.base!r}")


@dataclass(frozen=True)
class Circle:
    """``[0, 1)`` with Lebesgue measure; endpoints live in Q or in Q(sqrt(field))."""

    field: int | None = None


@dataclass(frozen=True)
class ProductSpace:
    """Finite atom space times a fiber space, with the product measure."""

    weights: tuple
    fiber: "Space"

    def __post_init__(self):
        object.__setattr__(self, "weights", AtomSpace(self.weights).weights)

    @property
    def size(self) -> int:
        return len(self.weights)


Space = Union[AtomSpace, CylinderSpace, Circle, ProductSpace]


def _same_space(a, b):
    if a.space is not b.space and a.space != b.space:
        raise SpaceMismatchError(f"sets live on different spaces: {a.space} vs {b.space}")


# ---------------------------------------------------------------- atoms


@dataclass(frozen=True)
class AtomSet:
    space: AtomSpace
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.space.size:
            raise StructuralError("atom mask refers to atoms outside the space")

    @property
    def members(self) -> tuple[int, ...]:
        m, out = self.mask, []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def normalize(self):
        return self

    def measure(self) -> Fraction:
        w = self.space.weights
        return sum((w[i] for i in self.members), ZERO)

    def complement(self):
        return AtomSet(self.space, ((1 << self.space.size) - 1) & ~self.mask)

    def _binary(self, other, op):
        _same_space(self, other)
        return AtomSet(self.space, op(self.mask, other.mask))

    def is_null(self) -> bool:
        return self.mask == 0


# ---------------------------------------------------------------- cylinders


def _repeat(block: int, copies: int, width: int) -> int:
    """Concatenate ``copies`` copies of a ``width``-bit block."""
    if copies == 1:
        return block
    out, w, c = block, width, 1
    # doubling keeps this O(log copies) big-int operations
    while c * 2 <= copies:
        out |= out << w
        w *= 2
        c *= 2
    if c < copies:
        out |= _repeat(block, copies - c, width) << w
    return out


@dataclass(frozen=True)
class CylinderSet:
    """Union of level-``level`` cylinders; bit ``i`` of ``mask`` selects cylinder index ``i``."""

    base: int
    level: int
    mask: int

    def __post_init__(self):
        if self.base < 2 or self.level < 0:
            raise StructuralError("cylinder base must be >= 2 and level >= 0")
        if self.mask < 0 or self.mask >> (self.base**self.level):
            raise StructuralError("cylinder index out of range for its level")

    @classmethod
    def from_indices(cls, base: int, level: int, indices: Iterable[int]) -> "CylinderSet":
        size = base**level
        m = 0
        for i in indices:
            if not 0 <= i < size:
                raise StructuralError(f"cylinder index {i} outside [0, {size})")
            m |= 1 << i
        return cls(base, level, m)

    @property
    def space(self) -> CylinderSpace:
        return CylinderSpace(self.base)

    @property
    def width(self) -> int:
        return self.base**self.level

    @property
    def indices(self) -> tuple[int, ...]:
        m, out = self.mask, []
        while m:
            low = m & -m
            out.append(low.bit_length() - 1)
            m ^= low
        return tuple(out)

    def words(self) -> list[str]:
        """Big-endian digit words of the selected cylinders (first digit first)."""
        out = []
        for i in self.indices:
            digits = []
            for _ in range(self.level):
                i, d = divmod(i, self.base)
                digits.append(str(d))
            out.append("".join(digits))
        return out

    def refine(self, level: int) -> "CylinderSet":
        """Same set expressed at a finer ``level`` (not canonical)."""
        if level < self.level:
            raise StructuralError("cannot refine to a coarser level")
        if level == self.level:
            return self
        copies = self.base ** (level - self.level)
        return CylinderSet(self.base, level, _repeat(self.mask, copies, self.width))

    def normalize(self) -> "CylinderSet":
        b, k, m = self.base, self.level, self.mask
        while k > 0:
            w = b ** (k - 1)
            low = m & ((1 << w) - 1)
            if _repeat(low, b, w) != m:
                break
            m, k = low, k - 1
        if k == self.level:
            return self
        return CylinderSet(b, k, m)

    def measure(self) -> Fraction:
        return Fraction(self.mask.bit_count(), self.width)

    def complement(self):
        return CylinderSet(self.base, self.level, ((1 << self.width) - 1) & ~self.mask).normalize()

    def _binary(self, other, op):
        _same_space(self, other)
        k = max(self.level, other.level)
        a, b = self.refine(k), other.refine(k)
        return CylinderSet(self.base, k, op(a.mask, b.mask)).normalize()

    def is_null(self) -> bool:
        return self.mask == 0


def cylinder(base: int, word: str | Sequence[int]) -> CylinderSet:
    """The cylinder of sequences starting with ``word`` (first digit first)."""
    digits = [int(c) for c in word] if isinstance(word, str) else list(word)
    idx = 0
    for pos, d in enumerate(digits):
        if not 0 <= d < base:
            raise StructuralError(f"digit {d} outside base {base}")
        idx += d * base**pos
    return CylinderSet(base, len(digits), 1 << idx)


# ---------------------------------------------------------------- intervals


def _merge(pieces) -> tuple:
    pieces = sorted(pieces)
    out: list[list] = []
    for l, r in pieces:
        if out and l <= out[-1][1]:
            if r > out[-1][1]:
                out[-1][1] = r
        else:
            out.append([l, r])
    return tuple((l, r) for l, r in out)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of half-open intervals ``[l, r)`` inside the circle ``[0, 1)``."""

    space: Circle
    intervals: tuple

    def __post_init__(self):
        prev = None
        for l, r in self.intervals:
            for x in (l, r):
                f = field_of(x)
                if f is not None and f != self.space.field:
                    raise SpaceMismatchError(f"endpoint {format_scalar(x)} is outside the circle's field")
            if not (0 <= l < r <= 1):
                raise StructuralError(f"bad interval [{format_scalar(l)}, {format_scalar(r)})")
            if prev is not None and not prev < l:
                raise StructuralError("intervals must be sorted, disjoint and merged")
            prev = r

    @classmethod
    def build(cls, space: Circle, pieces: Iterable) -> "IntervalSet":
        """Canonical set from arbitrary (possibly overlapping or empty) pieces."""
        ps = []
        for l, r in pieces:
            l, r = as_scalar(l), as_scalar(r)
            if r < l:
                raise StructuralError(f"interval endpoints out of order: [{l}, {r})")
            if l < r:
                ps.append((l, r))
        return cls(space, _merge(ps))

    def normalize(self):
        return self

    def measure(self) -> Scalar:
        return sum((r - l for l, r in self.intervals), ZERO)

    def complement(self):
        out, cur = [], ZERO
        for l, r in self.intervals:
            if cur < l:
                out.append((cur, l))
            cur = r
        if cur < 1:
            out.append((cur, ONE))
        return IntervalSet(self.space, tuple(out))

    def is_null(self) -> bool:
        return not self.intervals

    def _union(self, other):
        _same_space(self, other)
        return IntervalSet(self.space, _merge(self.intervals + other.intervals))

    def _intersect(self, other):
        _same_space(self, other)
        a, b = self.intervals, other.intervals
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(self.space, tuple(out))

    def _binary(self, other, op):
        if op is _OR:
            return self._union(other)
        if op is _AND:
            return self._intersect(other)
        if op is _XOR:
            return self._intersect(other.complement())._union(other._intersect(self.complement()))
        if op is _DIFF:
            return self._intersect(other.complement())
        raise AssertionError(op)


def interval(lo, hi, field: int | None = None) -> IntervalSet:
    lo, hi = as_scalar(lo), as_scalar(hi)
    if field is None:
        field = field_of(lo) or field_of(hi)
    if not (0 <= lo < hi <= 1):
        raise StructuralError(f"interval({format_scalar(lo)}, {format_scalar(hi)}) needs 0 <= lo < hi <= 1")
    return IntervalSet(Circle(field), ((lo, hi),))


# ---------------------------------------------------------------- products


@dataclass(frozen=True)
class ProductSet:
    """One fiber set per atom of the finite factor."""

    space: ProductSpace
    fibers: tuple

    def __post_init__(self):
        if len(self.fibers) != self.space.size:
            raise StructuralError("product set needs exactly one fiber per atom")
        fs = self.space.fiber
        for f in self.fibers:
            if f.space != fs:
                raise SpaceMismatchError("product fiber lives on the wrong space")

    def normalize(self):
        fibers = tuple(f.normalize() for f in self.fibers)
        return self if fibers == self.fibers else ProductSet(self.space, fibers)

    def measure(self) -> Scalar:
        return sum((w * f.measure() for w, f in zip(self.space.weights, self.fibers)), ZERO)

    def complement(self):
        return ProductSet(self.space, tuple(f.complement() for f in self.fibers))

    def is_null(self) -> bool:
        return all(f.is_null() for f in self.fibers)

    def _binary(self, other, op):
        _same_space(self, other)
        return ProductSet(self.space, tuple(f._binary(g, op) for f, g in zip(self.fibers, other.fibers)))


SetClass = Union[AtomSet, CylinderSet, IntervalSet, ProductSet]


# ---------------------------------------------------------------- constructors


def empty(space: Space) -> SetClass:
    if isinstance(space, AtomSpace):
        return AtomSet(space, 0)
    if isinstance(space, CylinderSpace):
        return CylinderSet(space.base, 0, 0)
    if isinstance(space, Circle):
        return IntervalSet(space, ())
    if isinstance(space, ProductSpace):
        return ProductSet(space, (empty(space.fiber),) * space.size)
    raise TypeError(f"unknown space {space!r}")


def full(space: Space) -> SetClass:
    if isinstance(space, AtomSpace):
        return AtomSet(space, (1 << space.size) - 1)
    if isinstance(space, CylinderSpace):
        return CylinderSet(space.base, 0, 1)
    if isinstance(space, Circle):
        return IntervalSet(space, ((ZERO, ONE),))
    if isinstance(space, ProductSpace):
        return ProductSet(space, (full(space.fiber),) * space.size)
    raise TypeError(f"unknown space {space!r}")


def atoms(space: AtomSpace | ProductSpace, members: Iterable[int]) -> SetClass:
    """Atom set; on a product space, the listed atoms with full fibers."""
    members = list(members)
    for i in members:
        if not 0 <= i < space.size:
            raise StructuralError(f"atom index {i} outside [0, {space.size})")
    if isinstance(space, ProductSpace):
        chosen = set(members)
        return ProductSet(
            space, tuple(full(space.fiber) if i in chosen else empty(space.fiber) for i in range(space.size))
        )
    return AtomSet(space, reduce(lambda m, i: m | (1 << i), members, 0))


def fiber_set(space: ProductSpace, atom: int, s: SetClass) -> ProductSet:
    """``{atom} x s`` inside a product space."""
    if not 0 <= atom < space.size:
        raise StructuralError(f"atom index {atom} outside [0, {space.size})")
    return ProductSet(space, tuple(s if i == atom else empty(space.fiber) for i in range(space.size)))


# ---------------------------------------------------------------- operations


def _OR(x, y):
    return x | y


def _AND(x, y):
    return x & y


def _XOR(x, y):
    return x ^ y


def _DIFF(x, y):
    return x & ~y


def normalize(s: SetClass) -> SetClass:
    return s.normalize()


def union(a: SetClass, b: SetClass) -> SetClass:
    return a._binary(b, _OR)


def intersect(a: SetClass, b: SetClass) -> SetClass:
    return a._binary(b, _AND)


def symdiff(a: SetClass, b: SetClass) -> SetClass:
    return a._binary(b, _XOR)


def difference(a: SetClass, b: SetClass) -> SetClass:
    return a._binary(b, _DIFF)


def complement(a: SetClass) -> SetClass:
    return a.complement()


def measure(s: SetClass) -> Scalar:
    return s.normalize().measure()


def distance(a: SetClass, b: SetClass) -> Scalar:
    """Frechet-Nikodym distance: the measure of the symmetric difference."""
    return symdiff(a, b).measure()


def is_null(s: SetClass) -> bool:
    return s.normalize().is_null()


def is_subset(a: SetClass, b: SetClass) -> bool:
    return difference(a, b).is_null()


for _cls in (AtomSet, CylinderSet, IntervalSet, ProductSet):
    _cls.__or__ = union
    _cls.__and__ = intersect
    _cls.__xor__ = symdiff
    _cls.__sub__ = difference
    _cls.__invert__ = complement
    _cls.__le__ = is_subset


def space_of(s: SetClass) -> Space:
    return s.space


# ---------------------------------------------------------------- text form


def prefix_cover(s: CylinderSet) -> list[str]:
    """Maximal cylinder words whose union is ``s``, in lexicographic order."""
    b = s.base
    out: list[str] = []

    def walk(prefix: str, idx: list[int], depth: int):
        # idx: indices of the remaining depth digits, little-endian
        if not idx:
            return
        if len(idx) == b**depth:
            out.append(prefix)
            return
        for d in range(b):
            sub = [i // b for i in idx if i % b == d]
            walk(prefix + str(d), sub, depth - 1)

    walk("", list(s.indices), s.level)
    return out


def format_set(s: SetClass) -> str:
    """Deterministic set-expression text that parses back to ``s``."""
    s = s.normalize()
    if s.is_null():
        return "empty"
    if s == full(s.space):
        return "full"
    if isinstance(s, AtomSet):
        return "atoms{" + ",".join(str(i) for i in s.members) + "}"
    if isinstance(s, CylinderSet):
        return " | ".join(f'cyl("{w}")' for w in prefix_cover(s))
    if isinstance(s, IntervalSet):
        return " | ".join(f"interval({format_scalar(l)}, {format_scalar(r)})" for l, r in s.intervals)
    if isinstance(s, ProductSet):
        parts = []
        for i, f in enumerate(s.fibers):
            if not f.is_null():
                parts.append(f"at({i}, {format_set(f)})")
        return " | ".join(parts)
    raise TypeError(s)
