"""CLI contract tests: exit codes, output schemas, manifests, determinism."""

import csv
import filecmp
import os
import re

import pytest

from parley.cli import main
from parley.exports import read_manifest

GOOD = """
[domain]
k = 10

[party1]
a1 = 1
a2 = 0
a3 = 4

[party2]
a1 = 0
a2 = 1
a3 = 7/3

[start]
x1 = 5
x2 = 4
"""


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestIdmCommand:
    def test_truthful_settlement(self, tmp_path, capsys):
        code, out, _ = run(["idm", "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        m = re.search(r"settlement: \(([-\d.]+), ([-\d.]+)\)", out)
        assert abs(float(m.group(1)) - 1.1410) < 0.02
        assert abs(float(m.group(2)) - 1.2884) < 0.02
        rows = read_csv(tmp_path / "trace.csv")
        assert rows[0]["x1"] == "5.0" and rows[0]["x2"] == "4.0"
        assert {"t", "x1", "x2", "g1", "g2", "lambda1", "lambda2",
                "lambda_star", "u1", "u2"} == set(rows[0])

    def test_strategic_truthful_pair(self, tmp_path, capsys):
        code, out, _ = run(["idm", "--declare1", "strategic",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        m = re.search(r"settlement: \(([-\d.]+), ([-\d.]+)\)", out)
        assert abs(float(m.group(1)) - 1.7435) < 0.02
        assert abs(float(m.group(2)) - 1.2565) < 0.02

    def test_numeric_declaration(self, tmp_path, capsys):
        code, out, _ = run(["idm", "--declare1", "7/3",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        assert "1.739" in out

    def test_malformed_scenario_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.ini"
        bad.write_text(GOOD.replace("k = 10", "k = ten"))
        code, _, err = run(["idm", "--scenario", str(bad),
                            "--out-dir", str(tmp_path / "out")], capsys)
        assert code == 2
        assert "k" in err

    def test_non_convergence_exits_1(self, tmp_path, capsys):
        code, _, err = run(["idm", "--max-iter", "3",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 1
        assert "convergence" in err


class TestPayoffCommand:
    def test_report_and_table(self, tmp_path, capsys):
        code, out, _ = run(["payoff", "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        assert "Dominant-strategy cell: (strategic, strategic)" in out
        assert "Prisoner's-Dilemma structure: yes" in out
        rows = read_csv(tmp_path / "payoff.csv")
        expected = {("truthful", "truthful"): (8.2290, 4.9767),
                    ("truthful", "strategic"): (7.9501, 5.1536),
                    ("strategic", "truthful"): (8.3395, 4.7688),
                    ("strategic", "strategic"): (8.0642, 4.9368)}
        for row in rows:
            for col in ("truthful", "strategic"):
                p1, p2 = map(float, row[col].strip("()").split(","))
                e1, e2 = expected[(row["party1\\party2"], col)]
                assert abs(p1 - e1) < 0.02 and abs(p2 - e2) < 0.02


class TestNinCommand:
    def test_outputs_and_trajectories(self, tmp_path, capsys):
        code, out, _ = run(["nin", "--trials", "10", "--M", "5",
                            "--seed", "3", "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "trials.csv")
        assert len(rows) == 10
        for i in range(10):
            assert (tmp_path / f"nin_traj_{i:02d}.csv").exists()
        # seeded reference run: every trajectory ends near the frontier
        for row in rows:
            assert float(row["rel_error"]) < 0.05

    def test_zero_trials_rejected(self, tmp_path, capsys):
        code, _, err = run(["nin", "--trials", "0",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 2
        assert "trials" in err


class TestMreSweepCommand:
    def test_sweep_rows(self, tmp_path, capsys):
        code, out, _ = run(["mre-sweep", "--M", "1..3", "--trials", "60",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "mre_sweep.csv")
        assert [r["M"] for r in rows] == ["1", "2", "3"]
        for m in (1, 2, 3):
            assert (tmp_path / f"hist_M{m}.csv").exists()

    def test_single_trial_has_empty_stderr(self, tmp_path, capsys):
        code, _, _ = run(["mre-sweep", "--M", "2", "--trials", "1",
                          "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        rows = read_csv(tmp_path / "mre_sweep.csv")
        assert len(rows) == 1
        assert rows[0]["stderr"] == ""

    def test_bad_range_rejected(self, tmp_path, capsys):
        code, _, err = run(["mre-sweep", "--M", "5..1",
                            "--out-dir", str(tmp_path)], capsys)
        assert code == 2


class TestAttackCommand:
    def test_report_values(self, tmp_path, capsys):
        code, out, _ = run(["attack", "--out-dir", str(tmp_path)], capsys)
        assert code == 0
        beta = float(re.search(r"recovered beta2: ([\d.]+)", out).group(1))
        assert abs(beta - 7 / 3) < 1e-4
        payoff = float(re.search(r"payoff at gamma\*: ([\d.]+)", out).group(1))
        assert payoff >= 8.33
        lift = float(re.search(r"payoff lift: ([\d.~-]+)", out).group(1))
        assert lift > 0

    def test_round_trip_scenario_with_unit_beta(self, tmp_path, capsys):
        sc = tmp_path / "unit.ini"
        sc.write_text(GOOD.replace("a3 = 7/3", "a3 = 1"))
        code, out, _ = run(["attack", "--scenario", str(sc),
                            "--out-dir", str(tmp_path / "out")], capsys)
        assert code == 0
        beta = float(re.search(r"recovered beta2: ([\d.]+)", out).group(1))
        assert abs(beta - 1.0) < 1e-6


def data_files(out_dir):
    return sorted(f for f in os.listdir(out_dir) if f != "manifest.json")


class TestManifest:
    def test_lists_exactly_the_produced_files(self, tmp_path, capsys):
        code, _, _ = run(["nin", "--trials", "4", "--out-dir", str(tmp_path)],
                         capsys)
        assert code == 0
        manifest = read_manifest(tmp_path / "manifest.json")
        assert sorted(manifest["outputs"]) == data_files(tmp_path)
        for name in manifest["outputs"]:
            assert (tmp_path / name).stat().st_size > 0
        assert manifest["command"] == "nin"
        assert manifest["seed"] == 1
        assert manifest["scenario_label"] == "paper-triangle"
        assert manifest["duration_seconds"] >= 0
        assert manifest["config"]["M"] == 5

    @pytest.mark.parametrize("args", [
        ["idm"],
        ["payoff"],
        ["nin", "--trials", "6", "--M", "4"],
        ["mre-sweep", "--M", "2..3", "--trials", "40"],
        ["attack"],
    ])
    def test_repeat_runs_are_byte_identical(self, args, tmp_path, capsys):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert main([*args, "--seed", "7", "--out-dir", str(d1)]) == 0
        assert main([*args, "--seed", "7", "--out-dir", str(d2)]) == 0
        capsys.readouterr()
        files = data_files(d1)
        assert files == data_files(d2)
        match, mismatch, errors = filecmp.cmpfiles(d1, d2, files, shallow=False)
        assert mismatch == [] and errors == []
        assert match == files
