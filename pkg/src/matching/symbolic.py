"""s-adic words for integer slopes: pseudocenters, interval endpoints read
off from expansions, the digit formula for the matching index, bisection
enumeration of matching intervals and the period-doubling substitution."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exact import format_rational


class NotSAdic(ValueError):
    pass


class EmptyInterval(ValueError):
    pass


class AmbiguousTie(ValueError):
    def __init__(self, candidates):
        super().__init__(f"several lowest-denominator candidates: {candidates}")
        self.candidates = candidates


class NotMultiple(ArithmeticError):
    pass


@dataclass(frozen=True)
class Word:
    digits: tuple
    base: int = 2

    @classmethod
    def parse(cls, text, base=2):
        return cls(tuple(int(c, 36) for c in text), base)

    def __str__(self):
        return "".join("0123456789abcdefghijklmnopqrstuvwxyz"[d] for d in self.digits)

    def __len__(self):
        return len(self.digits)

    def __add__(self, other):
        return Word(self.digits + other.digits, self.base)

    def __mul__(self, n):
        return Word(self.digits * n, self.base)

    @property
    def integer(self):
        n = 0
        for d in self.digits:
            n = n * self.base + d
        return n

    @property
    def value(self):
        return Fraction(self.integer, self.base ** len(self.digits))

    def repeating_value(self):
        """Value of .(self) repeated forever."""
        n = len(self.digits)
        return Fraction(self.integer, self.base ** n - 1)


def flip(u):
    return Word(tuple(u.base - 1 - d for d in u.digits), u.base)


def periodic_value(prefix, period):
    """Value of .prefix(period) with the period repeated."""
    return prefix.value + period.repeating_value() / prefix.base ** len(prefix)


def expansion(x, s):
    """Eventually periodic base-s expansion of a rational in [0,1):
    (prefix, period) with the period possibly empty."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError(f"{x} not in [0,1)")
    p, q = x.numerator, x.denominator
    seen, digits = {}, []
    while p and p not in seen:
        seen[p] = len(digits)
        p *= s
        digits.append(p // q)
        p %= q
    if not p:
        return Word(tuple(digits), s), Word((), s)
    k = seen[p]
    return Word(tuple(digits[:k]), s), Word(tuple(digits[k:]), s)


def sadic_level(x, s):
    """Smallest m with x*s^m an integer."""
    x = Fraction(x)
    den, r = x.denominator, x.denominator
    while (c := gcd(r, s)) > 1:
        r //= c
    if r != 1:
        raise NotSAdic(f"{x} is not {s}-adic")
    m, t = 0, 1
    while t % den:
        t *= s
        m += 1
    return m


def even_expansion(xi, s):
    xi = Fraction(xi)
    if not 0 < xi < 1:
        raise NotSAdic(f"{xi} not in (0,1)")
    m = sadic_level(xi, s)
    n = xi.numerator * s ** m // xi.denominator
    digits = []
    for _ in range(m):
        digits.append(n % s)
        n //= s
    digits.reverse()
    if m % 2:
        digits.append(0)
    return Word(tuple(digits), s)


def odd_complement(w):
    """The shortest odd expansion v of 1 - .w."""
    s, e = w.base, list(w.digits)
    if e[-1] == 0:
        v = [s - 1 - d for d in e[:-2]] + [s - e[-2]]
    else:
        v = [s - 1 - d for d in e[:-1]] + [s - e[-1], 0]
    return Word(tuple(v), s)


def word_norm(w):
    s = w.base
    return sum(s - 1 - 2 * d for d in w.digits)


def matching_index(w):
    s = w.base
    n = word_norm(w)
    if ((s + 1) * n) % 2:
        raise NotMultiple(f"(s+1)/2 * {n} is not an integer")
    delta = (s + 1) * n // 2
    if delta % (s + 1):
        raise NotMultiple(f"{delta} is not a multiple of {s + 1}")
    return delta


@dataclass(frozen=True)
class PseudocenterRecord:
    xi: Fraction
    w: Word
    v: Word
    xi_L: Fraction
    xi_R: Fraction
    delta: int

    @property
    def base(self):
        return self.w.base

    @property
    def interval(self):
        return self.xi_L, self.xi_R

    def to_json(self):
        return {"xi": format_rational(self.xi), "w": str(self.w), "v": str(self.v),
                "xiL": format_rational(self.xi_L), "xiR": format_rational(self.xi_R),
                "delta": self.delta}


def record_from_word(w):
    v = odd_complement(w)
    return PseudocenterRecord(w.value, w, v, (flip(v) + v).repeating_value(),
                              w.repeating_value(), matching_index(w))


def interval_from_pseudocenter(xi, s):
    xi = Fraction(xi)
    if not 0 < xi < Fraction(s, s + 1):
        raise NotSAdic(f"{xi} outside (0, {s}/{s + 1})")
    return record_from_word(even_expansion(xi, s))


def is_pseudocenter(xi, s):
    """(True, None) or (False, k) with k minimal such that 0 < g^k(xi) < xi."""
    xi = Fraction(xi)
    sadic_level(xi, s)
    q, p = xi.denominator, xi.numerator
    x, k = p, 0
    while x:
        # g preserves the denominator s^m; the orbit dies at 0
        x = (s * (q - x)) % q
        k += 1
        if 0 < x < p:
            return False, k
    return True, None


def lowest_denominator_sadic(c, d, s):
    """The s-adic p/s^m in (c, d) with m minimal."""
    c, d = Fraction(c), Fraction(d)
    if c >= d:
        raise EmptyInterval(f"({c}, {d})")
    m, sm = 0, 1
    while True:
        lo = c.numerator * sm // c.denominator + 1
        hi = -((-d.numerator * sm) // d.denominator) - 1  # ceil(d s^m) - 1
        if lo <= hi:
            if lo < hi:
                raise AmbiguousTie([Fraction(p, sm) for p in range(lo, hi + 1)])
            return Fraction(lo, sm)
        m += 1
        sm *= s


def enumerate_matching_intervals(c, d, max_depth, s, window=None):
    """Every matching interval in (c, d) whose pseudocenter has an s-adic
    level at most max_depth, found by bisection, sorted by pseudocenter.

    When several lowest-level candidates share a gap (possible for s >= 3
    when the gap spans several components) each is in a different component,
    so each is the pseudocenter of its own; they are all emitted after an
    is_pseudocenter check.

    With window=(lo, hi) gaps disjoint from [lo, hi] are not explored, so
    only intervals meeting the window are guaranteed to be complete."""
    out = []
    stack = [(Fraction(c), Fraction(d))]
    while stack:
        a, b = stack.pop()
        if a >= b:
            continue
        if window is not None and (b <= window[0] or a >= window[1]):
            continue
        try:
            cands = [lowest_denominator_sadic(a, b, s)]
        except AmbiguousTie as tie:
            cands = tie.candidates
            if not all(is_pseudocenter(x, s)[0] for x in cands):
                raise
        if sadic_level(cands[0], s) > max_depth:
            continue
        left = a
        for xi in cands:
            rec = interval_from_pseudocenter(xi, s)
            out.append(rec)
            stack.append((left, rec.xi_L))
            left = rec.xi_R
        stack.append((left, b))
    out.sort(key=lambda r: r.xi)
    return out


def find_enclosing(gamma, s, max_depth=200):
    """The record of the matching interval containing a non-member gamma."""
    gamma = Fraction(gamma)
    a, b = Fraction(0), Fraction(s, s + 1)
    if not a < gamma < b:
        return None
    for _ in range(max_depth):
        try:
            cands = [lowest_denominator_sadic(a, b, s)]
        except AmbiguousTie as tie:
            cands = tie.candidates
        for xi in cands:
            rec = interval_from_pseudocenter(xi, s)
            if rec.xi_L < gamma < rec.xi_R:
                return rec
            if rec.xi_L <= gamma <= rec.xi_R:
                return None  # an endpoint, which lies in the bifurcation set
        # descend into the gap holding gamma
        bounds = [a]
        for xi in cands:
            rec = interval_from_pseudocenter(xi, s)
            bounds += [rec.xi_L, rec.xi_R]
        bounds.append(b)
        for i in range(0, len(bounds), 2):
            if bounds[i] < gamma < bounds[i + 1]:
                a, b = bounds[i], bounds[i + 1]
                break
    return None


# -- period doubling ----------------------------------------------------------

W, V, WF, VF = "W", "V", "Wf", "Vf"

CHI = {W: (VF, V), WF: (V, VF), V: (V, W), VF: (VF, WF)}


def chi_substitute(blocks):
    return tuple(b for x in blocks for b in CHI[x])


def block_digits(blocks, w, v):
    table = {W: w, V: v, WF: flip(w), VF: flip(v)}
    out = Word((), w.base)
    for b in blocks:
        out = out + table[b]
    return out


def cascade(xi, n, s):
    """n successive period-doubled pseudocenters after xi."""
    seed = interval_from_pseudocenter(xi, s)
    blocks, out = (W,), []
    for _ in range(n):
        blocks = chi_substitute(blocks)
        out.append(record_from_word(block_digits(blocks, seed.w, seed.v)))
    return out
