import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from matching.cli import main, run
from matching.exact import Quad, parse_field


def ok(argv):
    code, res = run(argv)
    assert code == 0, res
    return res[0]


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_intervals_integer_table():
    recs = json.loads(ok(["intervals", "--slope", "int:2", "--range", "0,2/3", "--depth", "6"]))
    got = {(r["xiL"], r["xiR"]) for r in recs}
    for pair in [("1/3", "2/3"), ("2/9", "1/3"), ("7/33", "2/9"), ("2/11", "1/5"),
                 ("1/9", "2/15"), ("6/43", "1/7")]:
        assert pair in got
    assert [r["xi"] for r in recs] == sorted((r["xi"] for r in recs), key=F)


def test_intervals_csv_and_out_file(tmp_path):
    out = tmp_path / "cat.csv"
    assert main(["intervals", "--range", "0,2/3", "--depth", "3", "--out", str(out)]) == 0
    r = rows(out.read_text())
    assert list(r[0]) == ["xi", "w", "v", "xiL", "xiR", "delta"]
    assert {"xi": "1/2", "w": "10", "v": "1", "xiL": "1/3", "xiR": "2/3",
            "delta": "0"} in r


def test_intervals_quadratic_slope():
    recs = json.loads(ok(["intervals", "--slope", "quad:1+1*sqrt(5)", "--range", "0.5,0.6",
                          "--grid", "5", "--budget", "60"]))
    r = recs[0]
    assert parse_field(r["lo"]) == Quad(-4, 2, 5)
    assert parse_field(r["hi"]) == Quad(-2, F(6, 5), 5)
    assert (r["kappaMinus"], r["kappaPlus"]) == (5, 6)


def test_empty_range_is_empty_catalog():
    assert json.loads(ok(["intervals", "--range", "1/2,1/2"])) == []


@pytest.mark.parametrize("argv", [
    ["intervals", "--slope", "int:1"],
    ["intervals", "--slope", "quad:1/3+1*sqrt(5)"],
    ["intervals", "--range", "2/3,0"],
    ["intervals", "--depth", "x"],
    ["frobnicate"],
    ["sweep", "--bogus", "1"],
])
def test_config_errors_exit_one(argv):
    code, msg = run(argv)
    assert code == 1 and msg.startswith("error:")


def test_density_examples():
    rep = json.loads(ok(["density", "7/10"]))[0]
    assert len(rep["atoms"]) == 3
    vals = [F(x) for x in rep["density"]]
    assert [v / vals[0] for v in vals] == [1, 2, 2]
    rep = json.loads(ok(["density", "-1/5"]))[0]
    assert len(rep["atoms"]) == 7


def test_density_of_member_exits_two():
    code, msg = run(["density", "1/3"])
    assert code == 2 and "1/3" in msg
    rep = json.loads(ok(["density", "1/3", "--markov"]))[0]
    assert sum(F(m) for m in rep["masses"]) == 1


def test_bifurcation_examples():
    reps = json.loads(ok(["bifurcation", "1/3", "7/32", "5/16"]))
    assert reps[0]["member"] is True
    assert reps[1]["member"] is False
    assert (reps[1]["record"]["xiL"], reps[1]["record"]["xiR"]) == ("7/33", "2/9")
    assert reps[2]["member"] is False
    assert reps[2]["record"]["xi"] == "1/4"


def test_bifurcation_reports_bad_items_inline():
    reps = json.loads(ok(["bifurcation", "1/3", "-1/5", "2"]))
    assert reps[0]["member"] is True
    assert "OutOfDomain" in reps[1]["error"] and "OutOfDomain" in reps[2]["error"]
    # an unparseable value is a usage error, not a per-item one
    assert run(["bifurcation", "1/3", "x"])[0] == 1


def test_entropy_examples():
    r = {x["gamma_exact"]: x for x in rows(ok(["entropy", "--range", "0,1", "--depth", "4"]))}
    assert r["0/1"]["h_metric_coeff"] == "4/7"
    assert abs(float(r["2/3"]["h_top_float"]) - 0.4812118) < 1e-7
    gs = [F(g) for g in r]
    assert gs == sorted(gs)


def test_entropy_shape():
    r = rows(ok(["entropy", "--range", "0,1", "--depth", "5"]))
    pts = [(F(x["gamma_exact"]), F(x["h_metric_coeff"])) for x in r if x["h_metric_coeff"]]
    left = [h for g, h in pts if 0 <= g <= F(1, 6)]
    flat = [h for g, h in pts if F(1, 6) <= g <= F(2, 3)]
    right = [h for g, h in pts if F(2, 3) <= g <= 1]
    assert left == sorted(left) and left[0] < left[-1]
    assert len(set(flat)) == 1
    assert right == sorted(right, reverse=True) and right[0] > right[-1]


def test_sweep_columns_and_round_trip():
    text = ok(["sweep", "--range", "-1,1", "--grid", "6"])
    r = rows(text)
    assert list(r[0]) == ["gamma_exact", "gamma_float", "h_metric_coeff", "h_metric_float",
                          "h_top_float", "method", "delta", "interval_lo", "interval_hi",
                          "error"]
    for x in r:
        g = parse_field(x["gamma_exact"])
        assert abs(float(g) - float(x["gamma_float"])) < 1e-14
        assert "/" in x["gamma_exact"]


def test_plateaux_examples():
    r = rows(ok(["plateaux", "--range", "0,0.7", "--depth", "8"]))
    assert (r[0]["lo"], r[0]["hi"], r[0]["flat"]) == ("1/6", "2/3", "true")
    assert ("125/1152", "1/9") in {(x["lo"], x["hi"]) for x in r}
    r = rows(ok(["plateaux", "--slope", "int:3", "--range", "0,3/4", "--depth", "4"]))
    assert (r[0]["lo"], r[0]["hi"]) == ("5/12", "3/4")


def test_jobs_do_not_change_output():
    argv = ["sweep", "--range", "-1,1", "--grid", "12"]
    assert ok(argv + ["--jobs", "1"]) == ok(argv + ["--jobs", "3"])


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nrange = -1,1\ngrid = 4\n")
    a = rows(ok(["sweep", "--config", str(cfg)]))
    assert len(a) == 4
    b = rows(ok(["sweep", "--config", str(cfg), "--grid", "2"]))
    assert len(b) == 2
    cfg.write_text("colour = blue\n")
    assert run(["sweep", "--config", str(cfg)])[0] == 1


def test_module_entry_point_exit_codes():
    cmd = [sys.executable, "-m", "matching"]
    assert subprocess.run(cmd + ["bifurcation", "1/3"], capture_output=True).returncode == 0
    assert subprocess.run(cmd + ["intervals", "--slope", "int:1"],
                          capture_output=True).returncode == 1
    assert subprocess.run(cmd + ["density", "1/3"], capture_output=True).returncode == 2
