"""Exact scalars: rationals, real quadratic surds a + b*sqrt(d), and affine
forms c0 + c1*g in the parameter g.

Rationals are plain ``fractions.Fraction``.  Surds get a small class of their
own so that ordering is decided by sign analysis, never by floats.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union


class FieldMismatch(ValueError):
    pass


class SlopeRejection(ValueError):
    def __init__(self, reason, message):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


@lru_cache(maxsize=None)
def _square_part(d):
    """Return (k, r) with d = k*k*r and r squarefree."""
    k, r, p = 1, d, 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            k *= p
        p += 1
    return k, r


def _sign(x):
    return (x > 0) - (x < 0)


def _surd_sign(a, b, d):
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger square wins
    diff = a * a - b * b * d
    return sa if diff > 0 else -sa


class Quad:
    """a + b*sqrt(d) with rational a, b and squarefree d > 1."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=5):
        a, b = Fraction(a), Fraction(b)
        k, r = _square_part(int(d))
        if d < 2 or r == 1:
            raise ValueError(f"sqrt({d}) is rational")
        self.a, self.b, self.d = a, b * k, r

    def _pair(self, other):
        if isinstance(other, Quad):
            if other.d != self.d:
                raise FieldMismatch(f"sqrt({self.d}) mixed with sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def _new(self, a, b):
        q = Quad.__new__(Quad)
        q.a, q.b, q.d = a, b, self.d
        return q

    def __add__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return self._new(self.a + p[0], self.b + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return self._new(self.a - p[0], self.b - p[1])

    def __rsub__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return self._new(p[0] - self.a, p[1] - self.b)

    def __mul__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        c, e = p
        return self._new(self.a * c + self.b * e * self.d, self.a * e + self.b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        c, e = p
        den = c * c - e * e * self.d
        if den == 0:
            raise ZeroDivisionError("division by zero surd")
        return self._new((self.a * c - self.b * e * self.d) / den,
                         (self.b * c - self.a * e) / den)

    def __rtruediv__(self, other):
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return self._new(*p) / self

    def __neg__(self):
        return self._new(-self.a, -self.b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out, base = self._new(Fraction(1), Fraction(0)), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self):
        return _surd_sign(self.a, self.b, self.d)

    def _cmp(self, other):
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            other = Fraction(other)
        p = self._pair(other)
        if p is None:
            return NotImplemented
        return _surd_sign(self.a - p[0], self.b - p[1], self.d)

    def __eq__(self, other):
        if isinstance(other, Quad):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Quad({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_field(self)

    def conjugate(self):
        return self._new(self.a, -self.b)


FieldElement = Union[Fraction, Quad]


class Degenerate(enum.Enum):
    IDENTICAL = "identical"
    NO_SOLUTION = "no solution"


def fe_sign(x):
    """Exact sign of a field element."""
    if isinstance(x, Quad):
        return x.sign()
    return _sign(x)


def fe_arith(x, y, op):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        if fe_sign(y) == 0:
            raise ZeroDivisionError("division by zero")
        return x / y
    raise ValueError(f"unknown op {op!r}")


def fe_floor(x):
    if isinstance(x, Quad):
        n = math.floor(float(x))
        while n > x:
            n -= 1
        while n + 1 <= x:
            n += 1
        return n
    return math.floor(x)


def canonical(x):
    """Collapse surds with zero irrational part to rationals."""
    if isinstance(x, Quad):
        return x.a if x.b == 0 else x
    if isinstance(x, int):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class AffineForm:
    """The function g -> c0 + c1*g."""

    c0: object
    c1: object

    def __call__(self, g):
        return self.c0 + self.c1 * g

    def __add__(self, other):
        if isinstance(other, AffineForm):
            return AffineForm(self.c0 + other.c0, self.c1 + other.c1)
        return AffineForm(self.c0 + other, self.c1)

    def __sub__(self, other):
        if isinstance(other, AffineForm):
            return AffineForm(self.c0 - other.c0, self.c1 - other.c1)
        return AffineForm(self.c0 - other, self.c1)

    def __neg__(self):
        return AffineForm(-self.c0, -self.c1)

    def scale(self, k):
        return AffineForm(self.c0 * k, self.c1 * k)

    def __str__(self):
        c0, c1 = canonical(self.c0), canonical(self.c1)
        parts = []
        if c0 != 0 or c1 == 0:
            parts.append(_coef(c0))
        if c1 != 0:
            if c1 == 1:
                t = "g"
            elif c1 == -1:
                t = "-g"
            else:
                t = f"{_coef(c1)}*g"
            if parts and not t.startswith("-"):
                t = "+" + t
            parts.append(t)
        return "".join(parts)


def _coef(x):
    if isinstance(x, Quad):
        return f"({format_field(x)})"
    return str(x)


GAMMA = AffineForm(Fraction(0), Fraction(1))


def affine_solve(p, q):
    """Solve p(g) = q(g)."""
    dc1 = p.c1 - q.c1
    dc0 = q.c0 - p.c0
    if fe_sign(dc1) == 0:
        return Degenerate.IDENTICAL if fe_sign(dc0) == 0 else Degenerate.NO_SOLUTION
    return canonical(dc0 / dc1)


def is_integer(x):
    if isinstance(x, Quad):
        return x.b == 0 and x.a.denominator == 1
    return Fraction(x).denominator == 1


def validate_slope(s):
    """Accept integers >= 2 and real quadratic algebraic integers > 1."""
    if isinstance(s, Quad) and s.b != 0:
        # minimal polynomial x^2 - 2a x + (a^2 - b^2 d)
        tr, nm = 2 * s.a, s.a * s.a - s.b * s.b * s.d
        if tr.denominator != 1 or nm.denominator != 1:
            raise SlopeRejection("NotAlgebraicInteger",
                                 f"{format_field(s)} has minimal polynomial "
                                 f"x^2-({tr})x+({nm}), not monic over Z")
        if s <= 1:
            raise SlopeRejection("SlopeTooSmall", f"{format_field(s)} <= 1")
        return s
    s = canonical(s)
    if Fraction(s).denominator != 1:
        raise SlopeRejection("NotAlgebraicInteger",
                             f"{s} is a non-integer rational; matching on an "
                             "interval forces an algebraic integer slope")
    if s <= 1:
        raise SlopeRejection("SlopeTooSmall", f"{s} <= 1")
    return s


# -- text formats -----------------------------------------------------------

def format_rational(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def format_field(x):
    if isinstance(x, float):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, Quad):
        if x.b == 0:
            return format_rational(x.a)
        b = str(x.b)
        head = "" if x.a == 0 else str(x.a)
        if head and not b.startswith("-"):
            b = "+" + b
        return f"{head}{b}*sqrt({x.d})"
    return format_rational(x)


_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:\.\d+)?(?:/\d+)?)\s*(\*\s*sqrt\(\s*(\d+)\s*\))?\s*")
_SQRT_ONLY = re.compile(r"(^|[+-])\s*sqrt\(")


def parse_field(text, d=None):
    """Parse 'p/q', a decimal, '-inf'/'inf', or 'a+b*sqrt(d)'."""
    t = text.strip()
    if t in ("inf", "+inf", "-inf"):
        return float(t)
    t = _SQRT_ONLY.sub(lambda m: f"{m.group(1)}1*sqrt(", t)
    a, b, root, pos = Fraction(0), Fraction(0), None, 0
    while pos < len(t):
        m = _TERM.match(t, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse field element {text!r}")
        if pos > 0 and not m.group(1):
            raise ValueError(f"missing operator in {text!r}")
        val = Fraction(m.group(2))
        if m.group(1) == "-":
            val = -val
        if m.group(3):
            k, r = _square_part(int(m.group(4)))
            if r == 1:
                a += val * k
            else:
                if root is not None and root != r:
                    raise FieldMismatch(f"several radicals in {text!r}")
                root = r
                b += val * k
        else:
            a += val
        pos = m.end()
    if root is None or b == 0:
        if d is not None and root is not None and root != d:
            raise FieldMismatch(f"sqrt({root}) in a sqrt({d}) session")
        return a
    if d is not None and root != d:
        raise FieldMismatch(f"sqrt({root}) in a sqrt({d}) session")
    return Quad(a, b, root)


def parse_slope(text):
    """'int:2' or 'quad:a/b+c/e*sqrt(d)'; the value is validated."""
    kind, _, body = text.strip().partition(":")
    if kind == "int":
        s = Fraction(body)
    elif kind == "quad":
        s = parse_field(body)
    else:
        raise ValueError(f"slope must start with 'int:' or 'quad:', got {text!r}")
    s = validate_slope(s)
    if not isinstance(s, Quad):
        return int(s)
    return s
