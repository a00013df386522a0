import csv
import io
import json
import subprocess
import sys

import pytest

from bethe_forge.cli import RunConfig, ConfigError, main

BASE = ["-n", "2", "--eta", "-1", "-L", "2", "--inhomogeneities", "0,1/3"]


def run(tmp_path, *argv, name="out.txt"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_verify_yb_passes(tmp_path):
    code, text = run(tmp_path, "verify", "--suite", "yb", "-n", "2", "--eta", "-1")
    assert code == 0
    report = json.loads(text)
    assert report["schema"] == 1 and report["pass"] is True
    assert report["config"]["n"] == 2 and report["config"]["eta"] == "-1"
    assert {"results", "roots", "spectrum"} <= set(report)


def test_invalid_rank_exits_2(tmp_path, capsys):
    assert main(["verify", "--eta", "1/1", "-n", "0"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_config_file_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "eta": "1", "bogus": 3}))
    assert main(["verify", "--config", str(cfg)]) == 2
    cfg.write_text("[1, 2]")
    assert main(["verify", "--config", str(cfg)]) == 2
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"n": 2, "eta": 0.5})


def test_corrupted_r_exits_1_with_counterexample(tmp_path):
    code, text = run(tmp_path, "verify", "--suite", "yb,rtt", *BASE, "--corrupt-r", "--points", "1")
    assert code == 1
    report = json.loads(text)
    failed = [r for r in report["results"] if not r["pass"]]
    assert failed and all(r["counterexample"] for r in failed)


def test_config_file_matches_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "eta": "-1", "L": 2, "inhomogeneities": ["0", "1/3"],
                               "suites": ["transfer"], "points": 2}))
    c1, t1 = run(tmp_path, "verify", "--config", str(cfg), name="a.json")
    c2, t2 = run(tmp_path, "verify", *BASE, "--suite", "transfer", "--points", "2", name="b.json")
    assert c1 == c2 == 0
    assert t1 == t2


def test_solve_reports_are_byte_identical(tmp_path):
    args = ("solve", *BASE, "--schedule", "1,0", "--seeds", "8", "--seed", "3", "--match")
    c1, t1 = run(tmp_path, *args, name="a.json")
    c2, t2 = run(tmp_path, *args, name="b.json")
    assert c1 == c2 == 0
    assert t1 == t2
    report = json.loads(t1)
    assert report["roots"] and all(r["verified"] for r in report["roots"])
    assert any(abs(r["rapidities"][0]["re"] - 5 / 3) < 1e-9 for r in report["roots"])
    assert report["sector_empty"] is False
    assert "unexplained" in report


def test_solve_empty_schedule_gives_vacuum_root(tmp_path):
    code, text = run(tmp_path, "solve", *BASE, "--schedule", "0,0", "--seeds", "2")
    assert code == 0
    report = json.loads(text)
    assert [r["rapidities"] for r in report["roots"]] == [[]]


def test_solve_empty_sector_is_flagged(tmp_path):
    code, text = run(tmp_path, "solve", *BASE, "--schedule", "1,1", "--seeds", "10")
    assert code == 0
    report = json.loads(text)
    assert report["sector_empty"] is True
    assert report["null_roots"]


def test_solve_failed_eigencheck_exits_1(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "eta": "-1", "L": 2, "inhomogeneities": ["0", "1/3"],
                               "schedule": [[1, 0]], "seeds": 8, "tolerances": {"eigen": 1e-40}}))
    code, text = run(tmp_path, "solve", "--config", str(cfg))
    assert code == 1
    assert json.loads(text)["pass"] is False


def test_solve_match_dimension_guard(tmp_path):
    code, _ = run(tmp_path, "solve", "-n", "2", "--eta", "1", "-L", "7", "--vacuum-index", "-1",
                  "--schedule", "1,0", "--match")
    assert code == 2


def test_spectrum_csv(tmp_path):
    code, text = run(tmp_path, "spectrum", *BASE, "--x", "2/7,-3/2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["sign", "x", "re", "im", "matched_root_id"]
    assert len(rows) == 16 * 2 * 2
    for sign in ("1", "-1"):
        for x in ("2/7", "-3/2"):
            block = [r for r in rows if r["sign"] == sign and r["x"] == x]
            assert len(block) == 16
            assert any(r["matched_root_id"] == "vacuum" for r in block)


def test_spectrum_json_with_root_and_n1(tmp_path):
    code, text = run(tmp_path, "spectrum", *BASE, "--schedule", "1,0", "--seeds", "6", "--format", "json")
    assert code == 0
    report = json.loads(text)
    tags = {r["matched_root_id"] for r in report["spectrum"]}
    assert "vacuum" in tags and "0" in tags
    code, text = run(tmp_path, "spectrum", "-n", "1", "--eta", "1/2", "-L", "2", "--format", "json", name="n1")
    assert code == 0
    assert len(json.loads(text)["spectrum"]) == 4 * 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bethe_forge", "verify", "--suite", "yb", "-n", "1",
                           "--eta", "1", "--points", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["pass"] is True
