"""Tuning windows [xi_T, xi_R] and the block language inside them.

Inside the window of a seed (w, v) every point is an infinite concatenation
of the blocks w, v, wf, vf (flips), written

    vf wf^n1 v w^n2 vf wf^n3 v ...

so a point is described by its exponent sequence n1 n2 n3 ...
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import format_rational
from .symbolic import (V, VF, W, WF, PseudocenterRecord, Word, flip,
                       enumerate_matching_intervals, interval_from_pseudocenter,
                       periodic_value)


class NotMinimal(ValueError):
    pass


class Incomparable(ValueError):
    pass


@dataclass(frozen=True)
class TuningWindow:
    seed: PseudocenterRecord
    xi_T: Fraction
    xi_R: Fraction

    def to_json(self):
        return {"seed": self.seed.to_json(), "xiT": format_rational(self.xi_T),
                "xiR": format_rational(self.xi_R)}


def tuning_window(seed):
    return TuningWindow(seed, periodic_value(flip(seed.v), flip(seed.w)), seed.xi_R)


# -- block words ---------------------------------------------------------------

_NEXT = {W: (W, VF), V: (W, VF), VF: (V, WF), WF: (V, WF)}


def is_admissible(blocks):
    """(True, None) or (False, 1-based position of the offending block)."""
    if not blocks:
        return True, None
    if blocks[0] not in (W, VF):
        return False, 1
    for i in range(1, len(blocks)):
        if blocks[i] not in _NEXT[blocks[i - 1]]:
            return False, i + 1
    return True, None


# -- exponent sequences ------------------------------------------------------

@dataclass(frozen=True)
class ExponentSequence:
    """prefix followed by period repeated forever; an empty period means a
    finite sequence."""

    prefix: tuple = ()
    period: tuple = ()

    @property
    def finite(self):
        return not self.period

    def __getitem__(self, k):
        if k < len(self.prefix):
            return self.prefix[k]
        if not self.period:
            raise IndexError(k)
        return self.period[(k - len(self.prefix)) % len(self.period)]

    def __len__(self):
        if self.period:
            raise TypeError("infinite sequence")
        return len(self.prefix)

    def shift(self, k):
        if k <= len(self.prefix):
            return ExponentSequence(self.prefix[k:], self.period)
        j = (k - len(self.prefix)) % len(self.period)
        return ExponentSequence((), self.period[j:] + self.period[:j])


def alo_compare(a, b, start=0):
    """Alternate lexicographic order: -1, 0 or 1.

    At the first differing index k the smaller entry is smaller when
    k + start is even and larger otherwise.  start=0 numbers the sequence from
    n0 (a leading run of w blocks); start=1 numbers it from n1 as in window
    words, which is the convention that matches the real order of points."""
    if not isinstance(a, ExponentSequence):
        a = ExponentSequence(tuple(a))
    if not isinstance(b, ExponentSequence):
        b = ExponentSequence(tuple(b))
    if a.finite or b.finite:
        n = min(len(a.prefix) if a.finite else math.inf,
                len(b.prefix) if b.finite else math.inf)
    else:
        n = max(len(a.prefix), len(b.prefix)) + math.lcm(len(a.period), len(b.period))
    for k in range(n):
        x, y = a[k], b[k]
        if x != y:
            less = x < y if (k + start) % 2 == 0 else x > y
            return -1 if less else 1
    if not (a.finite and b.finite and len(a) == len(b)) and (a.finite or b.finite):
        raise Incomparable("one sequence is a prefix of the other")
    return 0


def window_bifurcation_member(n):
    """(True, None) if n is ALO-minimal among its shifts, else (False, k)."""
    if not isinstance(n, ExponentSequence) or n.finite:
        raise ValueError("need an eventually periodic sequence")
    for k in range(1, len(n.prefix) + len(n.period) + 1):
        if alo_compare(n.shift(k), n, start=1) < 0:
            return False, k
    return True, None


def window_digits(seed, n):
    """The digit word vf wf^n1 v w^n2 ... for a finite exponent sequence."""
    w, v = seed.w, seed.v
    wf, vf = flip(w), flip(v)
    out = Word((), w.base)
    for j, e in enumerate(n):
        if j % 2 == 0:
            out = out + vf + wf * e
        else:
            out = out + v + w * e
    return out


def window_blocks(n):
    out = []
    for j, e in enumerate(n):
        out += [VF] + [WF] * e if j % 2 == 0 else [V] + [W] * e
    return tuple(out)


def window_pseudocenter_word(seed, n):
    n = tuple(n)
    if not n or len(n) % 2:
        raise ValueError("need an exponent sequence of even length")
    per = ExponentSequence((), n)
    for k in range(1, len(n)):
        if alo_compare(per.shift(k), per, start=1) < 0:
            raise NotMinimal(f"{n} is not minimal among its rotations")
    return window_digits(seed, n)


def tuning_index(seed, n):
    from .symbolic import word_norm
    alt = sum((-1) ** j * e for j, e in enumerate(n, start=1))
    return alt * word_norm(seed.w)


def cf_encode(seed, quotients):
    if any(a < 1 for a in quotients):
        raise ValueError("partial quotients must be positive")
    return window_digits(seed, [a - 1 for a in quotients])


# -- plateaux ---------------------------------------------------------------

@dataclass(frozen=True)
class PlateauCandidate:
    lo: Fraction
    hi: Fraction
    kind: str
    depth: int
    seed: PseudocenterRecord | None = None
    left: PseudocenterRecord | None = None
    right: PseudocenterRecord | None = None

    def row(self):
        return [format_rational(self.lo), format_rational(self.hi), self.kind, str(self.depth)]


def plateau_scan(lo, hi, depth, s, records=None):
    """Candidate neutral windows inside [lo, hi].

    The tuning window of a neutral seed only holds neutral intervals, so it
    lies inside one plateau.  Maximal such windows are reported, together
    with the nearest non-neutral enumerated intervals on each side.  A window
    containing an enumerated non-neutral interval is labelled 'mixed'."""
    lo, hi = Fraction(lo), Fraction(hi)
    top = Fraction(s, s + 1)
    if records is None:
        records = enumerate_matching_intervals(0, top, depth, s)
    wins = [tuning_window(r) for r in records if r.delta == 0]
    wins.sort(key=lambda t: (t.xi_T, -t.xi_R))
    maximal, reach = [], Fraction(-1)
    for t in wins:
        if t.xi_R <= reach:
            continue
        maximal.append(t)
        reach = t.xi_R
    loud = [r for r in records if r.delta != 0]
    out = []
    for t in maximal:
        if not (lo <= t.xi_T and t.xi_R <= hi):
            continue
        inside = [r for r in loud if t.xi_T < r.xi and r.xi < t.xi_R]
        left = max((r for r in loud if r.xi_R <= t.xi_T), key=lambda r: r.xi_R, default=None)
        right = min((r for r in loud if r.xi_L >= t.xi_R), key=lambda r: r.xi_L, default=None)
        kind = "mixed" if inside else "neutralWindow"
        out.append(PlateauCandidate(t.xi_T, t.xi_R, kind, depth, t.seed, left, right))
    out.sort(key=lambda c: (-(c.hi - c.lo), c.lo))
    return out
