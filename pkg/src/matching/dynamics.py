"""The map Q_g(x) = x+1 (x <= g), 1+s(1-x) (x > g), its one-sided orbits
from the discontinuity, matching detection and the integer-slope model map
g(x) = s(1-x) mod 1.

Slopes are passed as plain values: an ``int`` for integer slopes or a
``Quad`` for quadratic ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .exact import AffineForm, Quad, canonical, fe_floor, parse_slope, validate_slope

BELOW, EXACT, ABOVE = -1, 0, 1
SIDE_NAMES = {BELOW: "below", EXACT: "exact", ABOVE: "above"}

NEG_INF = float("-inf")
POS_INF = float("inf")

DEFAULT_BUDGET = 200


class NoMatchWithinBudget(Exception):
    def __init__(self, budget):
        super().__init__(f"no matching within {budget} steps")
        self.budget = budget


class StructuralFailure(Exception):
    def __init__(self, step, side):
        super().__init__(f"{SIDE_NAMES[side]} orbit hits the discontinuity at step {step}")
        self.step = step
        self.side = side


class OutOfDomain(ValueError):
    pass


class OrbitNotFinite(Exception):
    pass


@dataclass(frozen=True)
class SlopeSpec:
    s: object
    kind: str

    @classmethod
    def parse(cls, text):
        return cls.of(parse_slope(text))

    @classmethod
    def of(cls, s):
        s = validate_slope(s)
        if isinstance(s, Quad):
            return cls(s, "quadratic")
        return cls(int(s), "integer")

    def __float__(self):
        return float(self.s)

    @property
    def log(self):
        return math.log(float(self.s))


def _raw(slope):
    if isinstance(slope, SlopeSpec):
        return slope.s
    return slope


def is_integer_slope(slope):
    return isinstance(_raw(slope), int)


@dataclass(frozen=True)
class SidedPoint:
    value: object
    side: int = EXACT


def q_step(slope, gamma, x):
    """One step of Q_g on a side-tagged point: (image, branch, factor)."""
    s = _raw(slope)
    if x.value < gamma or (x.value == gamma and x.side <= EXACT):
        return SidedPoint(x.value + 1, x.side), "L", 1
    return SidedPoint(1 + s * (1 - x.value), -x.side), "R", -s


def q_value(slope, gamma, x):
    """Q_g at a plain point, using x <= g for the left branch."""
    s = _raw(slope)
    return x + 1 if x <= gamma else 1 + s * (1 - x)


class OrbitStep(NamedTuple):
    point: SidedPoint
    branch: str
    deriv_sign: int
    deriv_exponent: int


def orbit(slope, gamma, start, n):
    """The first n steps of the side-tagged orbit of ``start``."""
    steps, x, r = [], start, 0
    for _ in range(n):
        y, branch, _f = q_step(slope, gamma, x)
        r += branch == "R"
        steps.append(OrbitStep(y, branch, (-1) ** r, r))
        x = y
    return steps


# -- matching ----------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicOrbit:
    forms: tuple        # (AffineForm, branch) for steps 0 .. kappa-1
    constraints: tuple  # (form(g) - g as AffineForm, "below" | "above")


@dataclass(frozen=True)
class MatchingCertificate:
    gamma: object
    kappa_minus: int
    kappa_plus: int
    matched_point: AffineForm
    lo: object
    hi: object
    lower: SymbolicOrbit = field(repr=False)
    upper: SymbolicOrbit = field(repr=False)

    @property
    def delta(self):
        return self.kappa_plus - self.kappa_minus

    @property
    def neutral(self):
        return self.delta == 0

    @property
    def interval(self):
        return self.lo, self.hi

    @property
    def branch_codes(self):
        return ("".join(b for _, b in self.lower.forms),
                "".join(b for _, b in self.upper.forms))


def _scaled(s, gamma):
    """Integer slope and rational g run on integers scaled by the denominator."""
    if isinstance(s, int) and isinstance(gamma, (int, Fraction)):
        g = Fraction(gamma)
        return g.denominator, g.numerator, g.denominator
    return 1, gamma, None


def _walk(s, one, g, side, n):
    """Values, sides and R-counts along a side-tagged orbit (scaled)."""
    top = one + s * one
    xs, sides, rs = [g], [side], [0]
    x, r = g, 0
    for _ in range(n):
        if x < g or (x == g and side <= 0):
            x = x + one
        else:
            x = top - s * x
            side = -side
            r += 1
        xs.append(x)
        sides.append(side)
        rs.append(r)
    return xs, sides, rs


def _find_match(s, one, g, budget):
    top = one + s * one
    lx, ls, lr = g, BELOW, 0
    ux, us, ur = g, ABOVE, 0
    seen_l, seen_u = {}, {}
    for k in range(1, budget + 1):
        if lx < g or (lx == g and ls <= 0):
            lx = lx + one
        else:
            lx, ls, lr = top - s * lx, -ls, lr + 1
        if ux < g or (ux == g and us <= 0):
            ux = ux + one
        else:
            ux, us, ur = top - s * ux, -us, ur + 1
        kl, ku = (lx, lr), (ux, ur)
        seen_l.setdefault(kl, k)
        seen_u.setdefault(ku, k)
        j = seen_u.get(kl)
        if j is not None:
            return k, j
        i = seen_l.get(ku)
        if i is not None:
            return i, k
    return None


def _symbolic(s, one, g, gamma, xs, rs, kappa, side):
    """Forms, branch choices and interval bounds for steps 0..kappa-1."""
    forms, cons = [], []
    lo, hi = NEG_INF, POS_INF
    ms = -s
    scaled = one != 1
    for k in range(kappa):
        x = xs[k]
        c1 = ms ** rs[k]
        if scaled:
            # integers scaled by one: c0 = (x - c1 g) / one
            form = AffineForm(Fraction(x - c1 * g, one), Fraction(c1))
        else:
            form = AffineForm(canonical(x - c1 * gamma), canonical(c1))
        if k == 0:
            branch = "L" if side == BELOW else "R"
            forms.append((form, branch))
            continue
        if x == g:
            raise StructuralFailure(k, side)
        left = x < g
        forms.append((form, "L" if left else "R"))
        if c1 == 1:
            continue  # g + k > g for every g
        rel = "below" if left else "above"
        cons.append((AffineForm(form.c0, form.c1 - 1), rel))
        # c0 + (c1-1) g < 0 (below) or > 0 (above)
        if scaled:
            root = Fraction(x - c1 * g, one * (1 - c1))
        else:
            root = canonical(form.c0 / (1 - c1))
        upper = (c1 - 1 > 0) == left
        if upper:
            if root < hi:
                hi = root
        elif root > lo:
            lo = root
    return SymbolicOrbit(tuple(forms), tuple(cons)), lo, hi


def detect_matching(slope, gamma, budget=DEFAULT_BUDGET):
    """Minimal matching exponents at g and the maximal open interval around
    g on which the same branch choices persist."""
    if budget < 1:
        raise ValueError("budget must be positive")
    s = _raw(slope)
    gamma = canonical(gamma)
    one, g, _ = _scaled(s, gamma)
    found = _find_match(s, one, g, budget)
    if found is None:
        raise NoMatchWithinBudget(budget)
    km, kp = found
    lxs, _, lrs = _walk(s, one, g, BELOW, km)
    uxs, _, urs = _walk(s, one, g, ABOVE, kp)
    lower, lo1, hi1 = _symbolic(s, one, g, gamma, lxs, lrs, km, BELOW)
    upper, lo2, hi2 = _symbolic(s, one, g, gamma, uxs, urs, kp, ABOVE)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    c1 = (-s) ** lrs[km]
    mval = canonical(Fraction(lxs[km], one) if one != 1 else lxs[km])
    matched = AffineForm(canonical(mval - c1 * gamma), canonical(c1))
    return MatchingCertificate(gamma, km, kp, matched, lo, hi, lower, upper)


def prematching_points(cert, gamma=None):
    """Interior orbit points before matching, as forms sorted at g."""
    gamma = cert.gamma if gamma is None else gamma
    pts = [f for f, _ in cert.lower.forms[1:]] + [f for f, _ in cert.upper.forms[1:]]
    return sorted(pts, key=lambda f: f(gamma))


# -- the model map g and the bifurcation set --------------------------------

def g_step(slope, x):
    s = _raw(slope)
    if not 0 <= x < 1:
        raise OutOfDomain(f"{x} not in [0,1)")
    y = s * (1 - x)
    return canonical(y - fe_floor(y))


def _digits(x, s, n):
    out = []
    for _ in range(n):
        x = x * s
        d = fe_floor(x)
        out.append(d)
        x = x - d
    return out


def first_return(slope, gamma, x):
    """First return of Q_g to [0,1): (value, q-steps, power of g)."""
    s = _raw(slope)
    if not 0 < x < 1 or x == gamma:
        raise OutOfDomain(f"{x} has no first return")
    y, n = x, 0
    while True:
        y = q_value(s, gamma, y)
        n += 1
        if 0 <= y < 1:
            break
        if n > 10 ** 6:
            raise OutOfDomain(f"{x} does not return")
    return canonical(y), n, (1 if x < gamma else 2)


def return_steps_formula(s, gamma, x):
    """Number of Q-steps of the first return predicted from the two leading
    s-ary digits of x (valid for 0 < g < 1 and integer s)."""
    a, b = _digits(Fraction(x), s, 2)
    if x < gamma:
        return a + 2
    return s * s - s * a - b + 1


class Membership(NamedTuple):
    member: bool
    witness: int | None = None


def bifurcation_member(slope, gamma):
    """Is g^k(gamma) >= gamma for all k?  Exact for rational gamma."""
    s = _raw(slope)
    if not isinstance(s, int):
        raise ValueError("bifurcation_member needs an integer slope")
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise OutOfDomain(f"{gamma} not in [0,1]")
    q, p = gamma.denominator, gamma.numerator
    x, seen, k = p, set(), 0
    while True:
        x = (s * (q - x)) % q
        k += 1
        if x < p:
            return Membership(False, k)
        if x in seen:
            return Membership(True)
        seen.add(x)


def conjugate_to_G(gamma, slope):
    """beta and the conjugacy H(x) = 2(x - g) onto G_beta."""
    s = _raw(slope)
    beta = canonical(2 * (1 + s) * (1 - gamma))
    return beta, AffineForm(canonical(-2 * gamma), Fraction(2))


# -- finite orbits -----------------------------------------------------------

def one_sided_orbit_points(slope, gamma, side, budget=100000):
    """All values visited by the orbit of (g, side) until it cycles."""
    s = _raw(slope)
    one, g, _ = _scaled(s, gamma)
    top = one + s * one
    x, sd = g, side
    seen = set()
    while (x, sd) not in seen:
        if len(seen) > budget:
            raise OrbitNotFinite(f"orbit of {gamma} longer than {budget}")
        seen.add((x, sd))
        if x < g or (x == g and sd <= 0):
            x = x + one
        else:
            x, sd = top - s * x, -sd
    vals = {v for v, _ in seen}
    if one != 1:
        return {Fraction(v, one) for v in vals}
    return {canonical(v) for v in vals}


def return_to_discontinuity(slope, gamma, side, budget=10000):
    """(period, R-count) if the orbit of (g, side) comes back to (g, side)."""
    s = _raw(slope)
    one, g, _ = _scaled(s, gamma)
    xs, sides, rs = _walk(s, one, g, side, budget)
    for k in range(1, budget + 1):
        if xs[k] == g and sides[k] == side:
            return k, rs[k]
    return None
