"""Command-line front end.

    matching intervals --slope int:2 --range 0,2/3 --depth 6
    matching entropy --slope int:2 --range 0,1 --depth 5 --out sweep.csv
    matching bifurcation --slope int:2 1/3 7/32 5/16
    matching plateaux --slope int:2 --depth 8 --samples 5
    matching density --slope int:2 7/10
    matching sweep --slope int:2 --range -1,1 --grid 200 --jobs 4

Settings can also come from a key=value file given with --config; flags on
the command line take precedence.  Exit codes: 0 ok, 1 bad configuration,
2 a structural or dynamical failure (no certificate, orbit on the
discontinuity).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import (NoMatchWithinBudget, OrbitNotFinite, StructuralFailure,
                       SlopeSpec, bifurcation_member, detect_matching)
from .exact import (Quad, SlopeRejection, canonical, format_field, format_rational,
                    parse_field)
from .spectral import (build_partition, invariant_density, markov_data,
                       markov_entropy, markov_metric_entropy, metric_entropy_closed, metric_entropy_interp,
                       metric_entropy_rokhlin, transition_matrices)
from .symbolic import (enumerate_matching_intervals, find_enclosing,
                       interval_from_pseudocenter, is_pseudocenter)
from .windows import plateau_scan

EXIT_OK, EXIT_CONFIG, EXIT_STRUCTURAL = 0, 1, 2

COMMANDS = ("intervals", "entropy", "bifurcation", "plateaux", "density", "sweep")

SWEEP_COLUMNS = ["gamma_exact", "gamma_float", "h_metric_coeff", "h_metric_float",
                 "h_top_float", "method", "delta", "interval_lo", "interval_hi", "error"]

DEFAULTS = {"slope": "int:2", "depth": 6, "budget": 200, "grid": 400, "samples": 5,
            "jobs": 1, "out": None, "range": None, "markov": False, "format": None}

FLAT_TOL = 1e-10


class ConfigError(Exception):
    pass


class StructuralError(Exception):
    pass


def fmt_float(x):
    if x is None:
        return ""
    return f"{float(x):.15g}"


def fmt_exact(x):
    if x is None:
        return ""
    return format_field(canonical(x)) if not isinstance(x, float) else format_field(x)


# -- configuration -----------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    slope: SlopeSpec
    lo: object = None
    hi: object = None
    depth: int = 6
    budget: int = 200
    grid: int = 400
    samples: int = 5
    out: str | None = None
    jobs: int = 1
    markov: bool = False
    fmt: str | None = None  # None: the command's natural format
    gammas: list = field(default_factory=list)

    @property
    def s(self):
        return self.slope.s

    @property
    def integer(self):
        return self.slope.kind == "integer"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="matching", description="Matching intervals and entropy of Q_g.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        c = sub.add_parser(name)
        c.add_argument("--slope")
        c.add_argument("--range", help="lo,hi as exact values")
        c.add_argument("--depth", type=int)
        c.add_argument("--budget", type=int)
        c.add_argument("--grid", type=int)
        c.add_argument("--samples", type=int)
        c.add_argument("--out")
        c.add_argument("--jobs", type=int)
        c.add_argument("--config", help="file of key=value lines")
        c.add_argument("--format", choices=("json", "csv"))
        c.add_argument("--markov", action="store_const", const=True,
                       help="treat the parameters as Markov (finite orbits)")
        if name in ("bifurcation", "density"):
            c.add_argument("gamma", nargs="*")
    return p


def read_config_file(path):
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, val = line.partition("=")
        if not eq:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS and key != "gamma":
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = val.strip()
    return out


def _int(name, v):
    try:
        n = int(v)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name} must be an integer, got {v!r}") from e
    if n < 1:
        raise ConfigError(f"{name} must be positive")
    return n


def _bool(v):
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def _value(text, d):
    try:
        x = parse_field(text, d)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad number {text!r}: {e}") from e
    return canonical(x) if not isinstance(x, float) else x


_VALUED = ("--slope", "--range", "--depth", "--budget", "--grid", "--samples", "--out",
           "--jobs", "--config", "--format")


def _glue_values(argv):
    """Negative numbers look like flags to argparse: attach flag values as
    '--range=-1,0' and move positional values behind '--', keeping order."""
    flags, pos, i = [], [], 0
    while i < len(argv):
        a = argv[i]
        if a == "--":
            pos += argv[i + 1:]
            break
        if a in _VALUED and i + 1 < len(argv):
            flags.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        if a.startswith("-") and not (len(a) > 1 and (a[1].isdigit() or a[1] == ".")):
            flags.append(a)
        elif not flags and not pos and a in COMMANDS:
            flags.append(a)
        else:
            pos.append(a)
        i += 1
    return flags + (["--"] + pos if pos else [])


def resolve(argv):
    args = build_parser().parse_args(_glue_values(list(argv)))
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    try:
        slope = SlopeSpec.parse(str(merged["slope"]))
    except SlopeRejection as e:
        raise ConfigError(f"invalid slope: {e}") from e
    except ValueError as e:
        raise ConfigError(f"invalid slope {merged['slope']!r}: {e}") from e
    d = slope.s.d if isinstance(slope.s, Quad) else None
    cfg = RunConfig(args.command, slope)
    for key in ("depth", "budget", "grid", "samples", "jobs"):
        setattr(cfg, key, _int(key, merged[key]))
    cfg.out = merged["out"]
    cfg.markov = _bool(merged["markov"])
    fmt = merged["format"]
    if fmt is None and cfg.out:
        fmt = "csv" if str(cfg.out).endswith(".csv") else "json"
    if fmt not in (None, "json", "csv"):
        raise ConfigError(f"format must be json or csv, got {fmt!r}")
    cfg.fmt = fmt
    if merged["range"] is not None:
        parts = str(merged["range"]).split(",")
        if len(parts) != 2:
            raise ConfigError("range must be lo,hi")
        cfg.lo, cfg.hi = (_value(t, d) for t in parts)
        if cfg.lo > cfg.hi:
            raise ConfigError("range must have lo <= hi")
    gammas = list(getattr(args, "gamma", None) or [])
    if not gammas and "gamma" in merged:
        gammas = merged["gamma"].replace(",", " ").split()
    cfg.gammas = [_value(t, d) for t in gammas]
    return cfg


# -- parallel map --------------------------------------------------------------

def pmap(fn, items, jobs):
    """Ordered map; results come back in input order for any worker count."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- intervals ---------------------------------------------------------------

INTERVAL_COLUMNS = ["xi", "w", "v", "xiL", "xiR", "delta"]
QUAD_COLUMNS = ["lo", "hi", "kappaMinus", "kappaPlus", "delta", "matchedPoint"]


def _integer_range(cfg):
    top = Fraction(cfg.s, cfg.s + 1)
    lo = Fraction(0) if cfg.lo is None else cfg.lo
    hi = top if cfg.hi is None else cfg.hi
    return lo, hi, top


def integer_catalog(cfg):
    lo, hi, top = _integer_range(cfg)
    if lo >= hi:
        return []
    recs = enumerate_matching_intervals(0, top, cfg.depth, cfg.s, window=(lo, hi))
    return [r for r in recs if r.xi_R > lo and r.xi_L < hi]


def _grid_task(task):
    s, g, budget = task
    try:
        c = detect_matching(s, g, budget)
    except (NoMatchWithinBudget, StructuralFailure):
        return None
    return (c.lo, c.hi, c.kappa_minus, c.kappa_plus, c.matched_point)


def quadratic_grid(cfg):
    """Matching intervals met by an evenly spaced grid of rationals."""
    lo = Fraction(0) if cfg.lo is None else cfg.lo
    hi = Fraction(1) if cfg.hi is None else cfg.hi
    if lo >= hi:
        return []
    n = cfg.grid
    pts = [lo + (hi - lo) * Fraction(2 * i + 1, 2 * n) for i in range(n)]
    found = pmap(_grid_task, [(cfg.s, g, cfg.budget) for g in pts], cfg.jobs)
    seen, out = set(), []
    for f in found:
        if f is None:
            continue
        key = (f[0], f[1])
        if key in seen:
            continue
        seen.add(key)
        out.append(f)
    out.sort(key=lambda f: f[0])
    return out


def cmd_intervals(cfg):
    if cfg.integer:
        recs = integer_catalog(cfg)
        if cfg.fmt == "csv":
            return _csv(INTERVAL_COLUMNS, [[r.to_json()[k] for k in INTERVAL_COLUMNS]
                                           for r in recs])
        return _json([r.to_json() for r in recs])
    found = quadratic_grid(cfg)
    rows = [{"lo": fmt_exact(a), "hi": fmt_exact(b), "kappaMinus": km, "kappaPlus": kp,
             "delta": kp - km, "matchedPoint": str(m)} for a, b, km, kp, m in found]
    if cfg.fmt == "csv":
        return _csv(QUAD_COLUMNS, [[r[k] for k in QUAD_COLUMNS] for r in rows])
    return _json(rows)


# -- entropy sweeps ----------------------------------------------------------

def _row(gamma, coeff=None, hm=None, htop=None, method="", delta=None, lo=None, hi=None,
         error=""):
    return {"gamma": gamma, "gamma_exact": fmt_exact(gamma), "gamma_float": fmt_float(gamma),
            "h_metric_coeff": fmt_exact(coeff), "h_metric_float": fmt_float(hm),
            "h_top_float": fmt_float(htop), "method": method,
            "delta": "" if delta is None else str(delta),
            "interval_lo": fmt_exact(lo), "interval_hi": fmt_exact(hi), "error": error}


def _markov_row(task):
    s, g, delta, lo, hi = task
    try:
        e = markov_entropy(s, g)
        return _row(g, e.coeff, e.h_metric, e.h_top, e.method, delta, lo, hi)
    except Exception as ex:  # per-row error, the sweep carries on
        return _row(g, method="markovSpectral", delta=delta, lo=lo, hi=hi,
                    error=f"{type(ex).__name__}: {ex}")


def _closed_row(task):
    s, g = task
    try:
        e = metric_entropy_closed(s, g)
    except Exception as ex:
        return _row(g, method="closedForm", error=f"{type(ex).__name__}: {ex}")
    return _row(g, e.coeff, e.h_metric, None, "closedForm")


def _interior(a, b, k):
    return [a + (b - a) * Fraction(i, k + 1) for i in range(1, k + 1)]


def entropy_rows(cfg):
    if not cfg.integer:
        raise ConfigError("entropy sweeps need an integer slope")
    s = cfg.s
    top = Fraction(s, s + 1)
    lo = Fraction(0) if cfg.lo is None else cfg.lo
    hi = Fraction(1) if cfg.hi is None else cfg.hi
    if lo >= hi:
        return []
    recs = []
    if lo < top and hi > 0:
        recs = enumerate_matching_intervals(0, top, cfg.depth, s,
                                            window=(max(lo, Fraction(0)), min(hi, top)))
        recs = [r for r in recs if r.xi_L >= lo and r.xi_R <= hi]
    ends = {}
    for r in recs:
        for g in (r.xi_L, r.xi_R):
            ends.setdefault(g, (r.delta, r.xi_L, r.xi_R))
    half = [g for g in (Fraction(0), top) if lo <= g <= hi]
    for g in half:
        ends.setdefault(g, (None, None, None))
    marks = pmap(_markov_row, [(s, g) + ends[g] for g in sorted(ends)], cfg.jobs)
    by_gamma = {r["gamma"]: r for r in marks}
    rows = list(marks)
    for r in recs:
        ra, rb = by_gamma[r.xi_L], by_gamma[r.xi_R]
        if ra["error"] or rb["error"]:
            for g in _interior(r.xi_L, r.xi_R, cfg.samples):
                rows.append(_row(g, method="interpolated", delta=r.delta, lo=r.xi_L,
                                 hi=r.xi_R, error="endpoint entropy unavailable"))
            continue
        ca, cb = Fraction(ra["h_metric_coeff"]), Fraction(rb["h_metric_coeff"])
        for g in _interior(r.xi_L, r.xi_R, cfg.samples):
            c = metric_entropy_interp(ca, cb, r.xi_L, r.xi_R, g)
            rows.append(_row(g, c, float(c) * cfg.slope.log, None, "interpolated",
                             r.delta, r.xi_L, r.xi_R))
    # closed form on the half-lines g <= 0 and g >= s/(s+1)
    tasks = []
    if lo < 0:
        tasks += [lo] + _interior(lo, min(hi, Fraction(0)), cfg.samples)
    if hi > top:
        tasks += _interior(max(lo, top), hi, cfg.samples) + [hi]
    rows += pmap(_closed_row, [(s, g) for g in tasks], cfg.jobs)
    return _sorted_unique(rows)


def _sorted_unique(rows):
    out, seen = [], set()
    for r in sorted(rows, key=lambda r: r["gamma"]):
        if r["gamma"] in seen:
            continue
        seen.add(r["gamma"])
        out.append(r)
    return out


def _sweep_point(task):
    s, g, budget, markov = task
    top = Fraction(s, s + 1) if isinstance(s, int) else None
    try:
        if markov:
            e = markov_entropy(s, g)
            return _row(g, e.coeff, e.h_metric, e.h_top, e.method)
        try:
            c = detect_matching(s, g, budget)
        except NoMatchWithinBudget:
            try:
                e = markov_entropy(s, g)
                return _row(g, e.coeff, e.h_metric, e.h_top, e.method)
            except OrbitNotFinite:
                if top is None or 0 < g < top:
                    raise
            e = metric_entropy_closed(s, g)
            return _row(g, e.coeff, e.h_metric, None, e.method)
        part = build_partition(s, g, c)
        dp = invariant_density(transition_matrices(s, g, part), part)
        e = metric_entropy_rokhlin(dp, part, s, g)
        lo, hi = c.lo, c.hi
        return _row(g, e.coeff, e.h_metric, None, e.method, c.delta,
                    lo, hi)
    except Exception as ex:
        return _row(g, method="", error=f"{type(ex).__name__}: {ex}")


def sweep_rows(cfg):
    lo = Fraction(-1) if cfg.lo is None else cfg.lo
    hi = Fraction(1) if cfg.hi is None else cfg.hi
    if lo >= hi:
        return []
    n = cfg.grid
    pts = [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)] if n > 1 else [lo]
    return _sorted_unique(pmap(_sweep_point, [(cfg.s, g, cfg.budget, cfg.markov) for g in pts],
                               cfg.jobs))


def _sweep_output(cfg, rows):
    if cfg.fmt == "json":
        return _json([{k: r[k] for k in SWEEP_COLUMNS} for r in rows])
    return _csv(SWEEP_COLUMNS, [[r[k] for k in SWEEP_COLUMNS] for r in rows])


def cmd_entropy(cfg):
    return _sweep_output(cfg, entropy_rows(cfg))


def cmd_sweep(cfg):
    return _sweep_output(cfg, sweep_rows(cfg))


# -- bifurcation -------------------------------------------------------------

def bifurcation_report(s, g):
    try:
        m = bifurcation_member(s, g)
    except Exception as ex:
        return {"gamma": fmt_exact(g), "error": f"{type(ex).__name__}: {ex}"}
    out = {"gamma": format_rational(g), "member": m.member,
           "status": "member" if m.member else "nonMember"}
    if m.member:
        return out
    out["witness"] = m.witness
    rec = find_enclosing(g, s)
    try:
        pc = is_pseudocenter(g, s)[0] and 0 < g < Fraction(s, s + 1)
    except ValueError:
        pc = False
    if pc:
        rec = interval_from_pseudocenter(g, s)
    out["pseudocenter"] = pc
    out["record"] = rec.to_json() if rec is not None else None
    return out


def cmd_bifurcation(cfg):
    if not cfg.integer:
        raise ConfigError("bifurcation queries need an integer slope")
    if not cfg.gammas:
        raise ConfigError("give at least one gamma")
    for g in cfg.gammas:
        if not isinstance(g, Fraction):
            raise ConfigError(f"{fmt_exact(g)} is not rational")
    return _json([bifurcation_report(cfg.s, g) for g in cfg.gammas])


# -- plateaux ----------------------------------------------------------------

PLATEAU_COLUMNS = ["lo", "hi", "kind", "depth", "samples", "spread", "flat"]


def _markov_points(cand, records, k):
    """Up to k Markov parameters in the window, lowest denominators first."""
    pts = {cand.lo, cand.hi}
    for r in records:
        for g in (r.xi_L, r.xi_R):
            if cand.lo <= g <= cand.hi:
                pts.add(g)
    return sorted(pts, key=lambda g: (g.denominator, g))[:k]


def _flatness(task):
    s, pts = task
    hs = []
    for g in pts:
        try:
            hs.append(markov_metric_entropy(s, g).h_metric)
        except Exception:
            continue
    if not hs:
        return 0, None
    return len(hs), max(hs) - min(hs)


def plateau_rows(cfg):
    if not cfg.integer:
        raise ConfigError("plateau scans need an integer slope")
    s = cfg.s
    lo, hi, top = _integer_range(cfg)
    if lo >= hi:
        return []
    recs = enumerate_matching_intervals(0, top, cfg.depth, s)
    cands = plateau_scan(lo, hi, cfg.depth, s, records=recs)
    checks = pmap(_flatness, [(s, _markov_points(c, recs, cfg.samples)) for c in cands],
                  cfg.jobs)
    rows = []
    for c, (n, spread) in zip(cands, checks):
        flat = "" if spread is None else str(spread <= FLAT_TOL).lower()
        rows.append(c.row() + [str(n), fmt_float(spread), flat])
    return rows


def cmd_plateaux(cfg):
    rows = plateau_rows(cfg)
    if cfg.fmt == "json":
        return _json([dict(zip(PLATEAU_COLUMNS, r)) for r in rows])
    return _csv(PLATEAU_COLUMNS, rows)


# -- density -----------------------------------------------------------------

def density_report(cfg, g):
    s = cfg.s
    if cfg.markov:
        try:
            part, td = markov_data(s, g)
        except OrbitNotFinite as e:
            raise StructuralError(f"gamma={fmt_exact(g)}: {e}") from e
        cert = None
    else:
        try:
            cert = detect_matching(s, g, cfg.budget)
        except NoMatchWithinBudget as e:
            raise StructuralError(f"gamma={fmt_exact(g)}: {e}; a parameter in the "
                                  "bifurcation set needs --markov") from e
        except StructuralFailure as e:
            raise StructuralError(f"gamma={fmt_exact(g)}: {e} (step {e.step})") from e
        part = build_partition(s, g, cert)
        td = transition_matrices(s, g, part)
    dp = invariant_density(td, part)
    masses = dp.masses(part)
    total = canonical(sum(masses, Fraction(0)))
    lens = part.lengths
    right_ok = all(canonical(sum((td.A[i][j] * lens[j] for j in range(len(lens))),
                                 Fraction(0)) - lens[i]) == 0 for i in range(len(lens)))
    e = metric_entropy_rokhlin(dp, part, s, g)
    out = {"gamma": fmt_exact(g), "atoms": [[fmt_exact(a), fmt_exact(b)] for a, b in part.atoms],
           "density": [fmt_exact(r) for r in dp.values],
           "masses": [fmt_exact(m) for m in masses],
           "normalized": total == 1, "lengthsRightEigenvector": right_ok,
           "h_metric_coeff": fmt_exact(e.coeff), "h_metric_float": fmt_float(e.h_metric)}
    if cert is not None:
        out.update({"kappaMinus": cert.kappa_minus, "kappaPlus": cert.kappa_plus,
                    "delta": cert.delta, "interval": [fmt_exact(cert.lo), fmt_exact(cert.hi)]})
    return out


def cmd_density(cfg):
    if not cfg.gammas:
        raise ConfigError("give at least one gamma")
    return _json([density_report(cfg, g) for g in cfg.gammas])


# -- output ------------------------------------------------------------------

def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


HANDLERS = {"intervals": cmd_intervals, "entropy": cmd_entropy,
            "bifurcation": cmd_bifurcation, "plateaux": cmd_plateaux,
            "density": cmd_density, "sweep": cmd_sweep}


def run(argv):
    """Run a command and return (exit code, output text)."""
    try:
        cfg = resolve(argv)
        text = HANDLERS[cfg.command](cfg)
    except ConfigError as e:
        return EXIT_CONFIG, f"error: {e}\n"
    except StructuralError as e:
        return EXIT_STRUCTURAL, f"error: {e}\n"
    return EXIT_OK, (text, cfg.out)


def main(argv=None):
    code, res = run(sys.argv[1:] if argv is None else argv)
    if code != EXIT_OK:
        sys.stderr.write(res)
        return code
    text, out = res
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
