"""Invariant densities and entropies of Q_g.

Between consecutive points of the prematching set (or of the full orbits of
g at a Markov parameter) the invariant density is constant, so it is the
left eigenvector of a finite matrix.  Everything here is exact; floats only
appear when log s is applied and when seeding the spectral-radius bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dynamics import (ABOVE, BELOW, OrbitNotFinite, _raw, detect_matching,
                       one_sided_orbit_points, prematching_points, q_value)
from .exact import Quad, canonical


class NotRefining(ValueError):
    pass


class NonUniqueDensity(ArithmeticError):
    pass


class NotInClosedFormRegion(ValueError):
    pass


class DegenerateEndpoint(ValueError):
    pass


def _zero(x):
    return x == 0


def attracting_interval(slope, gamma):
    """[Q(top), top] with top the larger one-sided image of g.

    For g <= s/(s+1) this is [s^2(g-1)+1, s(1-g)+1]."""
    s = _raw(slope)
    top = max(canonical(gamma + 1), canonical(1 + s * (1 - gamma)))
    return canonical(1 + s * (1 - top)), top


@dataclass(frozen=True)
class Partition:
    breakpoints: tuple
    gamma: object

    @property
    def atoms(self):
        b = self.breakpoints
        return [(b[i], b[i + 1]) for i in range(len(b) - 1)]

    @property
    def lengths(self):
        return [canonical(b - a) for a, b in self.atoms]

    def __len__(self):
        return len(self.breakpoints) - 1


def build_partition(slope, gamma, cert=None, markov=False, budget=200):
    """Breakpoints {g} + prematching set (or the full finite orbits of g in
    Markov mode) + the ends of K, sorted."""
    gamma = canonical(gamma)
    lo, hi = attracting_interval(slope, gamma)
    if markov:
        pts = one_sided_orbit_points(slope, gamma, BELOW) | one_sided_orbit_points(slope, gamma, ABOVE)
    else:
        if cert is None:
            cert = detect_matching(slope, gamma, budget)
        pts = {f(gamma) for f in prematching_points(cert, gamma)}
    pts = {canonical(p) for p in pts} | {gamma, lo, hi}
    pts = sorted(p for p in pts if lo <= p <= hi)
    return Partition(tuple(pts), gamma)


@dataclass(frozen=True)
class TransitionData:
    Pi: list
    A: list
    slopes: list


def _image(s, gamma, a, b):
    if b <= gamma:
        return a + 1, b + 1, 1
    if a >= gamma:
        return 1 + s * (1 - b), 1 + s * (1 - a), s
    raise NotRefining(f"atom [{a}, {b}] straddles {gamma}")


def transition_matrices(slope, gamma, part):
    s = _raw(slope)
    atoms = part.atoms
    lens = part.lengths
    n = len(atoms)
    Pi, A, ts = [], [], []
    for a, b in atoms:
        c, d, t = _image(s, gamma, a, b)
        row = []
        for j, (e, f) in enumerate(atoms):
            lo, hi = max(c, e), min(d, f)
            row.append(canonical((hi - lo) / lens[j]) if hi > lo else Fraction(0))
        Pi.append(row)
        A.append([canonical(x / t) for x in row])
        ts.append(t)
    return TransitionData(Pi, A, ts)


def nullspace(M):
    """Basis of {x : M x = 0} by exact Gauss-Jordan elimination."""
    rows = [list(r) for r in M]
    m, n = len(rows), len(rows[0]) if rows else 0
    pivots, r = [], 0
    for c in range(n):
        p = next((i for i in range(r, m) if not _zero(rows[i][c])), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [canonical(x * inv) for x in rows[r]]
        piv = rows[r]
        nz = [k for k in range(c, n) if not _zero(piv[k])]
        for i in range(m):
            if i != r and not _zero(rows[i][c]):
                f = rows[i][c]
                ri = rows[i]
                for k in nz:
                    ri[k] = canonical(ri[k] - f * piv[k])
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fc in free:
        x = [Fraction(0)] * n
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = canonical(-rows[i][fc])
        basis.append(x)
    return basis


@dataclass(frozen=True)
class DensityProfile:
    values: list

    def masses(self, part):
        return [canonical(r * l) for r, l in zip(self.values, part.lengths)]


def invariant_density(td, part):
    """Left eigenvector of A for eigenvalue 1, normalised to a probability."""
    n = len(td.A)
    # r A = r  <=>  (A - I)^T r^T = 0
    M = [[td.A[i][j] - (1 if i == j else 0) for i in range(n)] for j in range(n)]
    basis = nullspace(M)
    if len(basis) != 1:
        raise NonUniqueDensity(f"eigenspace of dimension {len(basis)}")
    r = basis[0]
    total = sum((x * l for x, l in zip(r, part.lengths)), Fraction(0))
    return DensityProfile([canonical(x / total) for x in r])


@dataclass(frozen=True)
class EntropyResult:
    h_metric: float | None
    coeff: object = None      # exact factor of log s
    h_top: float | None = None
    method: str = "rokhlin"


def _log(slope):
    return math.log(float(_raw(slope)))


def metric_entropy_rokhlin(dp, part, slope, gamma):
    """log s times the mass of the expanding branch."""
    mass = Fraction(0)
    for (a, b), m in zip(part.atoms, dp.masses(part)):
        if a >= gamma:
            mass = mass + m
    mass = canonical(mass)
    return EntropyResult(float(mass) * _log(slope), mass, None, "rokhlin")


def metric_entropy_closed(slope, gamma):
    s = _raw(slope)
    if not isinstance(s, int):
        raise ValueError("closed form needs an integer slope")
    gamma = Fraction(gamma)
    if gamma <= 0:
        c = Fraction(4) / (s * s + 3 - 2 * gamma * (s * s - 1))
    elif gamma >= Fraction(s, s + 1):
        c = Fraction(2) / (2 * gamma * (s + 1) - s + 1)
    else:
        raise NotInClosedFormRegion(f"{gamma} is inside (0, {s}/{s + 1})")
    return EntropyResult(float(c) * math.log(s), c, None, "closedForm")


def metric_entropy_interp(hA, hB, a, b, gamma):
    """h on a matching interval from its endpoint values: 1/h is affine.

    Exact inputs (rational coefficients and endpoints) give an exact result."""
    if hA == 0 or hB == 0:
        raise DegenerateEndpoint("zero entropy at an endpoint")
    return hB * hA * (b - a) / ((b - gamma) * hB + (gamma - a) * hA)


def entropy_at(slope, gamma, budget=200):
    """Rokhlin entropy from the prematching partition at a matching parameter."""
    cert = detect_matching(slope, gamma, budget)
    part = build_partition(slope, gamma, cert)
    dp = invariant_density(transition_matrices(slope, gamma, part), part)
    return metric_entropy_rokhlin(dp, part, slope, gamma)


# -- Markov parameters: spectral radius ---------------------------------------

def charpoly(M):
    """Characteristic polynomial det(xI - M), coefficients low to high,
    via reduction to Hessenberg form over the rationals."""
    n = len(M)
    H = [[Fraction(x) for x in row] for row in M]
    for m in range(1, n - 1):
        i = next((i for i in range(m, n) if H[i][m - 1] != 0), None)
        if i is None:
            continue
        if i != m:
            H[i], H[m] = H[m], H[i]
            for row in H:
                row[i], row[m] = row[m], row[i]
        piv = H[m][m - 1]
        for j in range(m + 1, n):
            if H[j][m - 1] == 0:
                continue
            u = H[j][m - 1] / piv
            Hj, Hm = H[j], H[m]
            # the matrices are sparse, so skip zero entries on both updates
            for k in range(n):
                if Hm[k]:
                    Hj[k] -= u * Hm[k]
            for row in H:
                if row[j]:
                    row[m] += u * row[j]
    polys = [[Fraction(1)]]
    for k in range(n):
        p = [Fraction(0)] + polys[k]                 # x * p_k
        for idx, c in enumerate(polys[k]):
            p[idx] -= H[k][k] * c
        t = Fraction(1)
        for i in range(1, k + 1):
            t *= H[k - i + 1][k - i]
            if t == 0:
                break
            coef = t * H[k - i][k]
            for idx, c in enumerate(polys[k - i]):
                p[idx] -= coef * c
        polys.append(p)
    return polys[n]


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def strong_components(adj):
    """Kosaraju on an adjacency list."""
    n = len(adj)
    order, seen = [], [False] * n
    for v in range(n):
        if seen[v]:
            continue
        stack = [(v, iter(adj[v]))]
        seen[v] = True
        while stack:
            u, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                order.append(u)
                stack.pop()
            elif not seen[nxt]:
                seen[nxt] = True
                stack.append((nxt, iter(adj[nxt])))
    radj = [[] for _ in range(n)]
    for u in range(n):
        for v in adj[u]:
            radj[v].append(u)
    comp, comps = [-1] * n, []
    for v in reversed(order):
        if comp[v] != -1:
            continue
        cur, stack = [], [v]
        comp[v] = len(comps)
        while stack:
            u = stack.pop()
            cur.append(u)
            for w in radj[u]:
                if comp[w] == -1:
                    comp[w] = len(comps)
                    stack.append(w)
        comps.append(sorted(cur))
    return comps


def perron_root(M, tol=Fraction(1, 10 ** 12)):
    """Largest real root of the characteristic polynomial of an irreducible
    nonnegative integer matrix, bracketed to width tol.

    The Perron root is simple and everything above it is a positive value of
    the polynomial, so a sign change next to a float estimate pins it down."""
    p = charpoly(M)
    est = max(abs(complex(z)) for z in np.linalg.eigvals(np.array(M, dtype=float)))
    width = Fraction(1, 10 ** 9) * max(1, Fraction(est))
    mid = Fraction(est)
    lo, hi = mid - width, mid + width
    for _ in range(60):
        if poly_eval(p, hi) > 0 and poly_eval(p, lo) < 0:
            break
        width *= 4
        lo, hi = max(mid - width, Fraction(0)), mid + width
    else:
        raise ArithmeticError("could not bracket the Perron root")
    while hi - lo > tol:
        m = (lo + hi) / 2
        if poly_eval(p, m) > 0:
            hi = m
        else:
            lo = m
    return lo, hi, p


def spectral_radius(Pi):
    """Spectral radius of a 0-1 matrix as the max over strong components."""
    n = len(Pi)
    adj = [[j for j in range(n) if Pi[i][j] != 0] for i in range(n)]
    best = None
    for comp in strong_components(adj):
        if len(comp) == 1 and Pi[comp[0]][comp[0]] == 0:
            continue
        sub = [[int(Pi[i][j]) for j in comp] for i in comp]
        lo, hi, _ = perron_root(sub)
        if best is None or lo > best[0]:
            best = (lo, hi)
    if best is None:
        return Fraction(0), Fraction(0)
    return best


def markov_data(slope, gamma):
    part = build_partition(slope, gamma, markov=True)
    td = transition_matrices(slope, gamma, part)
    if any(x not in (0, 1) for row in td.Pi for x in row):
        raise OrbitNotFinite(f"{gamma}: partition from the orbits is not Markov")
    return part, td


def topological_entropy_markov(slope, gamma):
    part, td = markov_data(slope, gamma)
    lo, hi = spectral_radius(td.Pi)
    rho = (lo + hi) / 2
    return EntropyResult(None, None, math.log(rho), "markovSpectral")


def markov_metric_entropy(slope, gamma):
    """Metric entropy alone at a Markov parameter (no spectral radius)."""
    part, td = markov_data(slope, gamma)
    return metric_entropy_rokhlin(invariant_density(td, part), part, slope, gamma)


def markov_entropy(slope, gamma):
    """Metric and topological entropy at a Markov parameter."""
    part, td = markov_data(slope, gamma)
    dp = invariant_density(td, part)
    hm = metric_entropy_rokhlin(dp, part, slope, gamma)
    lo, hi = spectral_radius(td.Pi)
    return EntropyResult(hm.h_metric, hm.coeff, math.log((lo + hi) / 2), "markovSpectral")


# -- first return and Abramov --------------------------------------------------

def return_time_integral(slope, gamma, max_steps=10000):
    """Integral of the first return time to J = [g, 1+g) against normalised
    Lebesgue measure, by pushing J forward branch by branch."""
    s = _raw(slope)
    gamma = canonical(gamma)
    jlo, jhi = gamma, gamma + 1
    pieces = [(jlo, jhi, 1)]   # (lo, hi, accumulated expansion)
    total, t = Fraction(0), 0
    while pieces:
        t += 1
        if t > max_steps:
            raise ArithmeticError("return time not reached")
        nxt = []
        for a, b, k in pieces:
            if a < gamma:
                c = min(b, gamma)
                nxt.append((a + 1, c + 1, k))
            if b > gamma:
                c = max(a, gamma)
                nxt.append((1 + s * (1 - b), 1 + s * (1 - c), k * s))
        pieces = []
        for a, b, k in nxt:
            lo, hi = max(a, jlo), min(b, jhi)
            if hi > lo:
                total += t * (hi - lo) / k
            if a < jlo:
                pieces.append((a, min(b, jlo), k))
            if b > jhi:
                pieces.append((max(a, jhi), b, k))
    return canonical(total)


def abramov_check(slope, gamma, dp=None, part=None):
    """|h * E[tau] - k log s| with k = 2 for g <= 0 and k = 1 for g >= s/(s+1).

    Returns (residual as a float, exact coefficient residual)."""
    s = _raw(slope)
    gamma = canonical(gamma)
    if gamma <= 0:
        k = 2
    elif gamma >= Fraction(s, s + 1):
        k = 1
    else:
        raise NotInClosedFormRegion(f"{gamma} is inside (0, {s}/{s + 1})")
    if part is None:
        part = build_partition(slope, gamma)
    if dp is None:
        dp = invariant_density(transition_matrices(slope, gamma, part), part)
    h = metric_entropy_rokhlin(dp, part, slope, gamma)
    exact = canonical(h.coeff * return_time_integral(slope, gamma) - k)
    return abs(float(exact)) * _log(slope), exact
