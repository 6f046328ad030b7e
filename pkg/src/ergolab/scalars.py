"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt(D)).

Rational values are plain :class:`fractions.Fraction` instances.  A
:class:`Quadratic` always has a nonzero irrational part; every operation that
cancels it hands back a ``Fraction``, so equal values share one representation.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "Quadratic",
    "Scalar",
    "FieldMismatchError",
    "as_scalar",
    "quadratic",
    "field_of",
    "is_rational",
    "floor",
    "frac",
    "format_scalar",
    "parse_scalar",
    "to_float",
    "continued_fraction",
]


class FieldMismatchError(ValueError):
    """Raised when scalars from two different quadratic fields meet."""


def _squarefree(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


class Quadratic:
    """``a + b*sqrt(D)`` with rational ``a``, nonzero rational ``b`` and squarefree ``D >= 2``."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b, D: int):
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            raise ValueError("irrational part must be nonzero; use quadratic() to normalize")
        if not isinstance(D, int) or not _squarefree(D):
            raise ValueError(f"D must be a squarefree integer >= 2, got {D!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "D", D)

    def __setattr__(self, name, value):
        raise AttributeError("Quadratic is immutable")

    # -- coercion -------------------------------------------------------
    def _parts(self, other):
        """Return (a, b) of ``other`` viewed in this field, or None."""
        if isinstance(other, Quadratic):
            if other.D != self.D:
                raise FieldMismatchError(f"Q(sqrt({self.D})) vs Q(sqrt({other.D}))")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return quadratic(self.a + p[0], self.b + p[1], self.D)

    __radd__ = __add__

    def __neg__(self):
        return Quadratic(-self.a, -self.b, self.D)

    def __pos__(self):
        return self

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return quadratic(self.a - p[0], self.b - p[1], self.D)

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return quadratic(p[0] - self.a, p[1] - self.b, self.D)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        return quadratic(self.a * c + self.b * d * self.D, self.a * d + self.b * c, self.D)

    __rmul__ = __mul__

    def conjugate(self) -> "Quadratic":
        return Quadratic(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        if d == 0:
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return quadratic(self.a / c, self.b / c, self.D)
        n = c * c - d * d * self.D
        # (a + b r)(c - d r) / (c^2 - d^2 D)
        return quadratic((self.a * c - self.b * d * self.D) / n, (self.b * c - self.a * d) / n, self.D)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        n = self.norm()
        c, d = p
        # (c + d r)(a - b r) / norm
        return quadratic((c * self.a - d * self.b * self.D) / n, (d * self.a - c * self.b) / n, self.D)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- order ----------------------------------------------------------
    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 D; never equal since sqrt(D) is irrational
        return sa if a * a > b * b * self.D else sb

    def _cmp(self, other) -> int | None:
        p = self._parts(other)
        if p is None:
            return None
        diff = quadratic(self.a - p[0], self.b - p[1], self.D)
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff.sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        if isinstance(other, Quadratic):
            return self.D == other.D and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(("Q", self.a, self.b, self.D))

    def __bool__(self):
        return True

    def __floor__(self) -> int:
        return floor(self)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self):
        return f"Quadratic({self.a!s}, {self.b!s}, {self.D})"

    def __str__(self):
        return format_scalar(self)

    def __reduce__(self):
        return (Quadratic, (self.a, self.b, self.D))


Scalar = Union[Fraction, Quadratic]


def quadratic(a, b, D: int | None) -> Scalar:
    """Build ``a + b*sqrt(D)``, collapsing to a ``Fraction`` when ``b == 0``."""
    b = Fraction(b)
    if b == 0 or D is None:
        if b != 0:
            raise ValueError("irrational part given without a field")
        return Fraction(a)
    return Quadratic(a, b, D)


def as_scalar(x) -> Scalar:
    if isinstance(x, (Fraction, Quadratic)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def field_of(x: Scalar) -> int | None:
    return x.D if isinstance(x, Quadratic) else None


def is_rational(x: Scalar) -> bool:
    return not isinstance(x, Quadratic)


def floor(x: Scalar) -> int:
    """Exact floor, using integer square roots for the irrational part."""
    if not isinstance(x, Quadratic):
        return math.floor(x)
    # x = (N + M sqrt(D)) / den with integers N, M and den > 0
    den = x.a.denominator * x.b.denominator
    N = x.a.numerator * x.b.denominator
    M = x.b.numerator * x.a.denominator
    r = math.isqrt(M * M * x.D)
    s = r if M > 0 else -r - 1
    # N + M sqrt(D) lies strictly between N + s and N + s + 1
    return (N + s) // den


def frac(x: Scalar) -> Scalar:
    """Fractional part, in [0, 1)."""
    return x - floor(x)


def to_float(x: Scalar) -> float:
    return float(x)


def continued_fraction(x: Scalar, terms: int) -> list[int]:
    """First ``terms`` partial quotients of ``x`` (fewer if ``x`` is rational)."""
    out = []
    for _ in range(terms):
        a = floor(x)
        out.append(a)
        rest = x - a
        if rest == 0:
            break
        x = 1 / rest
    return out


def format_scalar(x: Scalar) -> str:
    """Exact wire format: ``p/q`` (or ``p``) for rationals, ``(a + b*sqrt(D))`` otherwise."""
    if not isinstance(x, Quadratic):
        return str(Fraction(x))
    sign = "+" if x.b > 0 else "-"
    b = abs(x.b)
    coeff = "" if b == 1 else f"{b}*"
    if x.a == 0:
        lead = "-" if x.b < 0 else ""
        return f"({lead}{coeff}sqrt({x.D}))"
    return f"({x.a} {sign} {coeff}sqrt({x.D}))"


_RAT = r"[+-]?\d+(?:/\d+)?"
_QUAD_RE = re.compile(
    rf"^\(\s*(?:(?P<a>{_RAT})\s*(?P<op>[+-])\s*)?(?P<sb>[+-])?\s*(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<D>\d+)\s*\)\s*\)$"
)
_RAT_RE = re.compile(rf"^{_RAT}$")


def parse_scalar(text: str) -> Scalar:
    """Inverse of :func:`format_scalar`; also accepts the Unicode minus sign."""
    t = text.strip().replace("−", "-")
    if _RAT_RE.match(t):
        return Fraction(t)
    m = _QUAD_RE.match(t)
    if not m:
        raise ValueError(f"malformed scalar {text!r}")
    a = Fraction(m["a"]) if m["a"] is not None else Fraction(0)
    b = Fraction(m["b"]) if m["b"] is not None else Fraction(1)
    neg = (m["op"] == "-") if m["a"] is not None else False
    if m["sb"] == "-":
        neg = not neg
    if neg:
        b = -b
    D = int(m["D"])
    if not _squarefree(D):
        raise ValueError(f"sqrt({D}): D must be squarefree and >= 2")
    return quadratic(a, b, D)
