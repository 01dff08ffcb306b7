from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qlcause import cli

TABLE2 = {"p_d": 0.57, "p_d_a": 0.69, "p_d_b": 0.63, "p_d_c": 0.73, "p_d_abc": 0.55}


def write(path, doc):
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_malformed_json(self, tmp_path, capsys):
        code, _, err = run(capsys, "verify", "--config", write(tmp_path / "c.json", "{oops"))
        assert code == cli.EXIT_CONFIG and "malformed" in err

    def test_unknown_key(self, tmp_path, capsys):
        code, _, err = run(capsys, "sweep", "--config", write(tmp_path / "c.json", {"gird": []}))
        assert code == cli.EXIT_CONFIG and "gird" in err

    def test_nested_unknown_key(self, tmp_path, capsys):
        code, _, err = run(capsys, "verify", "--config", write(tmp_path / "c.json", {"params": {"alpha": 1}}))
        assert code == cli.EXIT_CONFIG

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, "verify", "--config", str(tmp_path / "absent.json"))
        assert code == cli.EXIT_CONFIG

    def test_wrong_family_params(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"family": "two_cause", "params": {"r2": 0.5}})
        assert run(capsys, "verify", "--config", cfg)[0] == cli.EXIT_CONFIG

    def test_seed_precedence(self, monkeypatch):
        monkeypatch.setenv("QLCAUSE_SEED", "11")
        assert cli._resolve_seed(None, {}) == 11
        assert cli._resolve_seed(None, {"seed": 4}) == 4
        assert cli._resolve_seed(2, {"seed": 4}) == 2
        monkeypatch.setenv("QLCAUSE_SEED", "x")
        with pytest.raises(cli.ConfigError):
            cli._resolve_seed(None, {})


class TestVerify:
    def test_two_cause_default(self, capsys):
        code, out, _ = run(capsys, "verify")
        doc = json.loads(out)
        assert code == 0 and doc["hard_checks_passed"]
        point = doc["points"][0]
        assert point["r"] == 0.5 and point["ordering_asserted"]
        assert point["report"]["p_d"] == pytest.approx(0.008177522138702613, abs=1e-12)

    def test_three_cause_reports_both_points(self, tmp_path, capsys):
        code, out, _ = run(capsys, "verify", "--config", write(tmp_path / "c.json", {"family": "three_cause"}))
        doc = json.loads(out)
        assert code == 0
        assert [p["r"] for p in doc["points"]] == [0.01, 0.5]
        table = doc["points"][0]["residuals"]
        assert set(table) == set(TABLE2)
        assert table["p_d"]["model"] == pytest.approx(0.2527726273280481, abs=1e-12)
        assert "complement_diagnostics" in doc["points"][0]

    def test_failed_ordering_exits_nonzero(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"params": {"alpha1": 0.5}})
        code, out, _ = run(capsys, "verify", "--config", cfg)
        assert code == cli.EXIT_CHECK and not json.loads(out)["hard_checks_passed"]

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "v.json"
        code, text, _ = run(capsys, "verify", "--out", str(out))
        assert code == 0 and out.read_text() == text


class TestSweep:
    def test_header_rows_and_endpoint(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"grid": {"start": 0, "stop": 1, "num": 101}})
        out = tmp_path / "s.csv"
        assert run(capsys, "sweep", "--config", cfg, "--out", str(out))[0] == 0
        data = out.read_bytes()
        assert b"\r" not in data
        lines = data.decode().splitlines()
        assert lines[0] == ("r,p_d,p_d_given_a,p_d_given_b,p_d_given_c,p_d_given_joint,"
                            "p_joint_given_d,p_joint_given_not_d,interference_a")
        assert len(lines) == 102
        first = lines[1].split(",")
        assert first[0] == "0" and first[4] == "" and first[5] == "0.5"
        assert {len(line.split(",")) for line in lines} == {9}

    def test_byte_identical(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"family": "three_cause", "grid": {"num": 11}})
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sweep", "--config", cfg, "--out", str(a))
        run(capsys, "sweep", "--config", cfg, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_roundtrip(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"grid": [0.0, 0.25, 1.0]})
        _, text, _ = run(capsys, "sweep", "--config", cfg)
        records = cli.read_sweep_csv(text)
        assert cli.rows_to_csv(records) == text
        assert records[0]["p_d_given_c"] is None

    def test_unwritable(self, tmp_path, capsys):
        code, _, err = run(capsys, "sweep", "--out", str(tmp_path / "missing" / "s.csv"))
        assert code == cli.EXIT_IO and "cannot write" in err

    def test_twelve_significant_digits(self):
        assert cli._fmt(1 / 3) == "0.333333333333"
        assert cli._fmt(None) == ""


class TestFit:
    def test_targets_file_and_determinism(self, tmp_path, capsys):
        write(tmp_path / "t.json", TABLE2)
        cfg = write(tmp_path / "f.json", {"family": "three_cause", "targets": "t.json",
                                          "random_draws": 30, "starts": 2})
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        code_a, _, _ = run(capsys, "fit", "--config", cfg, "--budget", "500", "--seed", "1", "--out", str(a))
        code_b, _, _ = run(capsys, "fit", "--config", cfg, "--budget", "500", "--seed", "1", "--out", str(b))
        assert code_a == code_b and code_a in (0, cli.EXIT_CHECK)
        assert a.read_bytes() == b.read_bytes()
        assert json.loads(a.read_text())["evaluations"] <= 500

    def test_infeasible(self, tmp_path, capsys):
        cfg = write(tmp_path / "f.json", {"family": "two_cause", "targets": {"p_d": 0.5}, "free": ["r"],
                                          "fixed": {"a3": 0.3, "a4": 0.3, "a5": 0.3}})
        assert run(capsys, "fit", "--config", cfg)[0] == cli.EXIT_INFEASIBLE

    def test_missing_targets_file(self, tmp_path, capsys):
        cfg = write(tmp_path / "f.json", {"targets": "nowhere.json"})
        assert run(capsys, "fit", "--config", cfg)[0] == cli.EXIT_CONFIG

    def test_bad_target_name(self, tmp_path, capsys):
        cfg = write(tmp_path / "f.json", {"family": "two_cause", "targets": {"p_d_abc": 0.5}})
        assert run(capsys, "fit", "--config", cfg)[0] == cli.EXIT_CONFIG

    def test_requires_config(self, capsys):
        assert run(capsys, "fit")[0] == cli.EXIT_CONFIG


class TestClassical:
    def test_small_run(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"suites": ["lemma", "theorem"], "lemma_trials": 500, "theorem_trials": 500})
        code, out, _ = run(capsys, "classical", "--config", cfg, "--seed", "3")
        doc = json.loads(out)
        assert code == 0 and doc["seed"] == 3
        assert doc["lemma"]["trials"] == 500 and doc["theorem"]["counterexamples"] == 0

    def test_feasibility_small_budget(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"suites": ["feasibility"], "feasibility": {"budget": 30000}})
        code, out, _ = run(capsys, "classical", "--config", cfg)
        doc = json.loads(out)["feasibility"]
        assert code == 0 and doc["realizable_without"] and doc["unrealizable_with"]

    def test_sampler_exhaustion(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.json", {"suites": ["theorem"], "theorem_trials": 5,
                                          "sampler": {"not_d_ratio": [1, 1], "max_redraws": 10}})
        code, out, _ = run(capsys, "classical", "--config", cfg)
        assert code == cli.EXIT_SAMPLER and json.loads(out)["theorem"]["trials"] == 0


class TestWitness:
    def test_default(self, capsys):
        code, out, _ = run(capsys, "witness")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "classical Lemma violated"
        assert doc["p_x_given_not_d"] == pytest.approx(0.6, abs=1e-12)

    def test_config_range(self, tmp_path, capsys):
        assert run(capsys, "witness", "--config", write(tmp_path / "w.json", {"c2": 1.5}))[0] == cli.EXIT_CONFIG


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qlcause", "witness"], capture_output=True, text=True)
    assert proc.returncode == 0 and "classical Lemma violated" in proc.stdout
