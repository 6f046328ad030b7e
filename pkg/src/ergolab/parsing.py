"""Text formats: the declarative system spec and the set-expression language.

System spec (whitespace-insensitive, ``#`` starts a comment)::

    spec   ::= item { item }
    item   ::= key "=" value | key block
    block  ::= "{" spec "}"
    value  ::= scalar | word | "[" [ scalar { "," scalar } ] "]"
    scalar ::= int | int "/" int | "(" rat ( "+" | "-" ) [ rat "*" ] "sqrt(" int ")" ")"

Recognised kinds::

    kind=odometer base=B
    kind=rotation alpha=SCALAR
    kind=permutation perm=[...] [weights=[...]]
    kind=identity n=N
    kind=product finite { ... } fiber { ... }      (or: of { ... } { ... })
    kind=power k=K of { ... }

Set expressions, operators from tightest to loosest binding: ``~``, ``&``,
``^``, ``|``, ``\\``.  Primaries are ``empty``, ``full``, ``cyl("0110")``,
``interval(lo, hi)``, ``atoms{0,2}``, ``at(i, expr)`` (fiber ``i`` of a
product) and parenthesised expressions.  Cylinder words are written first
digit first.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import (
    AtomSpace,
    Circle,
    CylinderSpace,
    IntervalSet,
    ProductSpace,
    SetClass,
    Space,
    atoms,
    cylinder,
    empty,
    fiber_set,
    format_set,
    full,
)
from .errors import ErgolabError, ParseError, SemanticError, StructuralError
from .scalars import field_of, format_scalar, parse_scalar
from .systems import FinitePermutation, Odometer, Power, Product, Rotation, System, identity, power

__all__ = ["parse_system_spec", "format_system", "parse_set_expr", "format_set"]


class _Cursor:
    def __init__(self, text: str):
        self.text = text.replace("−", "-")
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg: str, pos: int | None = None) -> ParseError:
        line, col = self.where(pos)
        return ParseError(msg, line, col)

    def skip(self):
        t = self.text
        while self.pos < len(t):
            c = t[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "#":
                nl = t.find("\n", self.pos)
                self.pos = len(t) if nl < 0 else nl
            else:
                break

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos : self.pos + 1]

    def eat(self, s: str) -> bool:
        self.skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.eat(s):
            found = self.text[self.pos : self.pos + 10] or "end of input"
            raise self.error(f"expected {s!r}, found {found!r}")

    def match(self, pattern: re.Pattern) -> str | None:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return m.group(0)

    def balanced(self) -> str:
        """Consume a parenthesised chunk, returning it including the parentheses."""
        self.skip()
        start = self.pos
        if not self.eat("("):
            raise self.error("expected '('")
        depth = 1
        while depth:
            if self.pos >= len(self.text):
                raise self.error("unbalanced parenthesis", start)
            c = self.text[self.pos]
            depth += c == "("
            depth -= c == ")"
            self.pos += 1
        return self.text[start : self.pos]

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?")
_INT = re.compile(r"\d+")


def _scalar(cur: _Cursor):
    start = cur.pos
    cur.skip()
    if cur.peek() == "(":
        chunk = cur.balanced()
    else:
        chunk = cur.match(_RATIONAL)
        if chunk is None:
            raise cur.error("expected an exact scalar (p/q or (a + b*sqrt(D)))")
    try:
        return parse_scalar(chunk)
    except (ValueError, ZeroDivisionError) as exc:
        raise cur.error(str(exc), start) from None


# ---------------------------------------------------------------- systems


def _spec_items(cur: _Cursor, closing: str | None) -> tuple[dict, list, dict]:
    fields: dict = {}
    blocks: list = []
    where: dict = {}
    while True:
        cur.skip()
        if closing is not None and cur.peek() == closing:
            break
        if cur.at_end():
            if closing is not None:
                raise cur.error(f"missing {closing!r}")
            break
        kpos = cur.pos
        key = cur.match(_IDENT)
        if key is None:
            raise cur.error("expected a key")
        where[key] = kpos
        if cur.eat("="):
            cur.skip()
            c = cur.peek()
            if c == "[":
                cur.expect("[")
                vals = []
                if not cur.eat("]"):
                    vals.append(_scalar(cur))
                    while cur.eat(","):
                        vals.append(_scalar(cur))
                    cur.expect("]")
                value = vals
            elif c and (c.isdigit() or c in "(+-"):
                value = _scalar(cur)
            else:
                value = cur.match(_IDENT)
                if value is None:
                    raise cur.error(f"expected a value for {key!r}")
            if key in fields:
                raise cur.error(f"duplicate key {key!r}", kpos)
            fields[key] = value
        elif cur.peek() == "{":
            while cur.eat("{"):
                inner = _system(cur, "}")
                cur.expect("}")
                blocks.append((key, inner))
        else:
            raise cur.error(f"expected '=' or '{{' after {key!r}")
    return fields, blocks, where


def _int_field(fields, key, cur, where) -> int:
    v = fields.get(key)
    if not isinstance(v, Fraction) or v.denominator != 1:
        raise cur.error(f"{key!r} must be an integer", where.get(key, cur.pos))
    return int(v)


def _system(cur: _Cursor, closing: str | None) -> System:
    start = cur.pos
    fields, blocks, where = _spec_items(cur, closing)
    kind = fields.get("kind")
    if kind is None:
        raise cur.error("missing 'kind'", start)
    try:
        if kind == "odometer":
            return Odometer(_int_field(fields, "base", cur, where))
        if kind == "rotation":
            if "alpha" not in fields:
                raise cur.error("rotation needs 'alpha'", start)
            return Rotation(fields["alpha"])
        if kind == "identity":
            return identity(_int_field(fields, "n", cur, where))
        if kind == "permutation":
            perm = fields.get("perm")
            if not isinstance(perm, list) or any(p.denominator != 1 for p in perm):
                raise cur.error("permutation needs 'perm=[...]' of integers", start)
            perm = [int(p) for p in perm]
            weights = fields.get("weights")
            space = AtomSpace.uniform(len(perm)) if weights is None else AtomSpace(tuple(weights))
            return FinitePermutation(space, tuple(perm))
        if kind == "product":
            named = dict(blocks)
            if "finite" in named and "fiber" in named:
                fin, fib = named["finite"], named["fiber"]
            elif [k for k, _ in blocks] == ["of", "of"]:
                fin, fib = blocks[0][1], blocks[1][1]
            else:
                raise cur.error("product needs 'finite { ... } fiber { ... }'", start)
            if not isinstance(fin, FinitePermutation):
                raise SemanticError("the finite factor of a product must be a permutation")
            return Product(fin, fib)
        if kind == "power":
            if len(blocks) != 1 or blocks[0][0] != "of":
                raise cur.error("power needs exactly one 'of { ... }' block", start)
            return power(blocks[0][1], _int_field(fields, "k", cur, where))
    except (StructuralError, SemanticError) as exc:
        raise SemanticError(f"{kind}: {exc}") from None
    except ErgolabError as exc:
        if isinstance(exc, ParseError):
            raise
        raise SemanticError(f"{kind}: {exc}") from None
    raise cur.error(f"unknown kind {kind!r}", where.get("kind", start))


def parse_system_spec(text: str) -> System:
    cur = _Cursor(text)
    T = _system(cur, None)
    if not cur.at_end():
        raise cur.error("trailing input")
    return T


def format_system(T: System) -> str:
    if isinstance(T, Odometer):
        return f"kind=odometer base={T.base}"
    if isinstance(T, Rotation):
        return f"kind=rotation alpha={format_scalar(T.alpha)}"
    if isinstance(T, FinitePermutation):
        perm = ",".join(str(p) for p in T.perm)
        w = ",".join(str(x) for x in T.space.weights)
        return f"kind=permutation perm=[{perm}] weights=[{w}]"
    if isinstance(T, Product):
        return f"kind=product finite {{ {format_system(T.finite)} }} fiber {{ {format_system(T.fiber)} }}"
    if isinstance(T, Power):
        return f"kind=power k={T.exponent} of {{ {format_system(T.base)} }}"
    raise TypeError(T)


# ---------------------------------------------------------------- sets


def _expr(cur: _Cursor, space: Space) -> SetClass:
    left = _union(cur, space)
    while cur.eat("\\"):
        left = left - _union(cur, space)
    return left


def _union(cur, space):
    left = _xor(cur, space)
    while cur.eat("|"):
        left = left | _xor(cur, space)
    return left


def _xor(cur, space):
    left = _inter(cur, space)
    while cur.eat("^"):
        left = left ^ _inter(cur, space)
    return left


def _inter(cur, space):
    left = _unary(cur, space)
    while cur.eat("&"):
        left = left & _unary(cur, space)
    return left


def _unary(cur, space):
    if cur.eat("~"):
        return ~_unary(cur, space)
    return _primary(cur, space)


def _kind(space: Space) -> str:
    return {AtomSpace: "atom", CylinderSpace: "cylinder", Circle: "circle", ProductSpace: "product"}[type(space)]


def _primary(cur: _Cursor, space: Space) -> SetClass:
    cur.skip()
    start = cur.pos
    if cur.peek() == "(":
        cur.expect("(")
        s = _expr(cur, space)
        cur.expect(")")
        return s
    name = cur.match(_IDENT)
    if name is None:
        raise cur.error("expected a set expression")
    if name == "empty":
        return empty(space)
    if name == "full":
        return full(space)
    if name == "cyl":
        if not isinstance(space, CylinderSpace):
            raise cur.error(f"cyl(...) needs a cylinder space, not a {_kind(space)} space", start)
        cur.expect("(")
        m = cur.match(re.compile(r'"([0-9]*)"'))
        if m is None:
            raise cur.error('expected a quoted digit word, e.g. cyl("011")')
        cur.expect(")")
        word = m[1:-1]
        bad = [c for c in word if int(c) >= space.base]
        if bad:
            raise cur.error(f"digit {bad[0]} outside base {space.base}", start)
        return cylinder(space.base, word)
    if name == "interval":
        if not isinstance(space, Circle):
            raise cur.error(f"interval(...) needs a circle space, not a {_kind(space)} space", start)
        cur.expect("(")
        lo = _scalar(cur)
        cur.expect(",")
        hi = _scalar(cur)
        cur.expect(")")
        if not (0 <= lo < hi <= 1):
            raise cur.error(f"interval({format_scalar(lo)}, {format_scalar(hi)}) needs 0 <= lo < hi <= 1", start)
        for x in (lo, hi):
            f = field_of(x)
            if f is not None and f != space.field:
                raise cur.error(f"endpoint {format_scalar(x)} is outside the circle's field", start)
        return IntervalSet(space, ((lo, hi),))
    if name == "atoms":
        if not isinstance(space, (AtomSpace, ProductSpace)):
            raise cur.error(f"atoms{{...}} needs an atom or product space, not a {_kind(space)} space", start)
        cur.expect("{")
        members = []
        if not cur.eat("}"):
            members.append(_index(cur, space.size))
            while cur.eat(","):
                members.append(_index(cur, space.size))
            cur.expect("}")
        return atoms(space, members)
    if name == "at":
        if not isinstance(space, ProductSpace):
            raise cur.error(f"at(...) needs a product space, not a {_kind(space)} space", start)
        cur.expect("(")
        i = _index(cur, space.size)
        cur.expect(",")
        inner = _expr(cur, space.fiber)
        cur.expect(")")
        return fiber_set(space, i, inner)
    raise cur.error(f"unknown set primitive {name!r}", start)


def _index(cur: _Cursor, size: int) -> int:
    start = cur.pos
    tok = cur.match(_INT)
    if tok is None:
        raise cur.error("expected an atom index")
    i = int(tok)
    if not i < size:
        raise cur.error(f"atom index {i} out of range (space has {size} atoms)", start)
    return i


def parse_set_expr(text: str, space: Space) -> SetClass:
    cur = _Cursor(text)
    try:
        s = _expr(cur, space)
    except StructuralError as exc:
        raise cur.error(str(exc)) from None
    if not cur.at_end():
        raise cur.error("trailing input")
    return s.normalize()
