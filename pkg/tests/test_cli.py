"""Command line interface: exit codes, file outputs, determinism."""

import json
from importlib import resources

import pytest

from xrlayout import __version__
from xrlayout.cli import compare_results, main
from xrlayout.errors import MismatchedScenarios
from xrlayout.metrics import summaries_from_csv, trials_from_csv
from xrlayout.scenario import SCHEMA_VERSION, bundled_scenario_names

FIXTURES = resources.files("xrlayout") / "fixtures"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVersion:
    def test_version_prints_machine_readable_json(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        blob = json.loads(capsys.readouterr().out)
        assert blob == {
            "package": "xrlayout",
            "version": __version__,
            "scenario_schema": SCHEMA_VERSION,
        }


class TestValidate:
    def test_valid_files_exit_zero(self, capsys):
        path = FIXTURES / "static_stationary_env_ref.scn"
        code, out, err = run_cli(capsys, "validate", str(path))
        assert code == 0
        assert out == f"{path}: OK\n"

    def test_invalid_file_prints_diagnostics_and_exits_one(self, capsys):
        bad = FIXTURES / "invalid" / "invalid_stationary_near_flag.scn"
        good = FIXTURES / "dynamic_mobile_env_ref.scn"
        code, out, err = run_cli(capsys, "validate", str(bad), str(good))
        assert code == 1
        lines = out.splitlines()
        assert any(": invariant" in line and str(bad) in line for line in lines)
        assert f"{good}: OK" in lines
        # diagnostics carry a 1-based location and a document path
        bad_line = next(line for line in lines if str(bad) in line)
        _, line_no, col_no, rest = bad_line.split(":", 3)
        assert int(line_no) >= 1 and int(col_no) >= 1
        assert " at trials" in rest

    def test_unreadable_file_exits_two(self, capsys, tmp_path):
        code, out, err = run_cli(capsys, "validate", str(tmp_path / "missing.scn"))
        assert code == 2
        assert "cannot read" in err


class TestRun:
    def test_requires_exactly_one_target(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "run", "--out", str(tmp_path))
        assert code == 2
        code, _, err2 = run_cli(
            capsys, "run", "--all", "--scenario", "static_mobile_env_ref",
            "--out", str(tmp_path),
        )
        assert code == 2
        assert "exactly one" in err and "exactly one" in err2

    def test_unknown_scenario_exits_two(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "run", "--scenario", "no_such_session", "--out", str(tmp_path)
        )
        assert code == 2
        assert "bundled" in err

    def test_invalid_scenario_file_exits_one(self, capsys, tmp_path):
        bad = FIXTURES / "invalid" / "invalid_mobile_five_trials.scn"
        code, _, err = run_cli(capsys, "run", "--scenario", str(bad), "--out", str(tmp_path))
        assert code == 1
        assert "invariant" in err

    def test_single_scenario_csv_outputs(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "run", "--scenario", "static_mobile_env_ref", "--out", str(tmp_path)
        )
        assert code == 0
        assert "1 sessions, 6 trials" in out
        summaries = summaries_from_csv((tmp_path / "summaries.csv").read_text())
        trials = trials_from_csv((tmp_path / "trials.csv").read_text())
        assert len(summaries) == 1
        assert len(trials) == 6
        assert summaries[0].context == "static_mobile"
        assert summaries[0].strategy == "environment_referenced"

    def test_all_runs_every_bundled_scenario(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "run", "--all", "--format", "json", "--out", str(tmp_path)
        )
        assert code == 0
        assert "8 sessions, 36 trials" in out
        doc = json.loads((tmp_path / "results.json").read_text())
        assert len(doc["summaries"]) == len(bundled_scenario_names()) == 8
        assert len(doc["trials"]) == 36
        assert doc["meta"]["sessions"] == 8
        assert doc["meta"]["seed"] == 42
        assert "timestamp" not in json.dumps(doc["meta"])
        keys = [(s["context"], s["strategy"]) for s in doc["summaries"]]
        assert keys == sorted(keys)

    def test_strategy_override(self, capsys, tmp_path):
        code, _, _ = run_cli(
            capsys, "run", "--scenario", "static_stationary_env_ref",
            "--strategy", "head-fixed", "--out", str(tmp_path),
        )
        assert code == 0
        trials = trials_from_csv((tmp_path / "trials.csv").read_text())
        assert {r.strategy for r in trials} == {"head_fixed"}

    def test_out_dir_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("XRLAYOUT_OUT_DIR", str(tmp_path / "nested" / "out"))
        code, out, _ = run_cli(capsys, "run", "--scenario", "dynamic_mobile_env_ref")
        assert code == 0
        assert (tmp_path / "nested" / "out" / "trials.csv").exists()

    def test_explicit_out_beats_env_var(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("XRLAYOUT_OUT_DIR", str(tmp_path / "env"))
        code, _, _ = run_cli(
            capsys, "run", "--scenario", "dynamic_mobile_env_ref",
            "--out", str(tmp_path / "flag"),
        )
        assert code == 0
        assert (tmp_path / "flag" / "trials.csv").exists()
        assert not (tmp_path / "env").exists()

    def test_identical_seeds_give_byte_identical_outputs(self, capsys, tmp_path):
        for sub in ("a", "b"):
            code, _, _ = run_cli(
                capsys, "run", "--all", "--seed", "7", "--format", "json",
                "--out", str(tmp_path / sub),
            )
            assert code == 0
        a = (tmp_path / "a" / "results.json").read_bytes()
        b = (tmp_path / "b" / "results.json").read_bytes()
        assert a == b

    def test_different_seeds_change_something(self, capsys, tmp_path):
        for sub, seed in (("a", "1"), ("b", "2")):
            run_cli(
                capsys, "run", "--scenario", "dynamic_mobile_body_fixed",
                "--seed", seed, "--format", "json", "--out", str(tmp_path / sub),
            )
        a = (tmp_path / "a" / "results.json").read_bytes()
        b = (tmp_path / "b" / "results.json").read_bytes()
        assert a != b

    def test_gaze_stream_export(self, capsys, tmp_path):
        code, out, _ = run_cli(
            capsys, "run", "--scenario", "static_stationary_env_ref",
            "--gaze", "--tick-hz", "10", "--out", str(tmp_path),
        )
        assert code == 0
        gaze = (tmp_path / "gaze_static_stationary_env_ref.csv").read_text()
        lines = gaze.splitlines()
        assert lines[0] == "t,target"
        assert len(lines) > 100
        t0 = float(lines[1].split(",", 1)[0])
        t1 = float(lines[2].split(",", 1)[0])
        assert t1 - t0 == pytest.approx(0.1)


class TestCompare:
    def _results(self, capsys, tmp_path, name, seed, sub, strategy=None):
        argv = [
            "run", "--scenario", name, "--seed", str(seed),
            "--format", "json", "--out", str(tmp_path / sub),
        ]
        if strategy:
            argv += ["--strategy", strategy]
        code, _, _ = run_cli(capsys, *argv)
        assert code == 0
        return tmp_path / sub / "results.json"

    def test_report_structure_and_antisymmetry(self, capsys, tmp_path):
        a = self._results(capsys, tmp_path, "dynamic_mobile_body_fixed", 1, "a")
        b = self._results(capsys, tmp_path, "dynamic_mobile_body_fixed", 2, "b")
        code, out, _ = run_cli(capsys, "compare", str(a), str(b))
        assert code == 0
        fwd = json.loads(out)["comparisons"]
        assert len(fwd) == 3  # one session key, three metrics
        code, out, _ = run_cli(capsys, "compare", str(b), str(a))
        rev = json.loads(out)["comparisons"]
        for f, r in zip(fwd, rev):
            assert f["metric"] == r["metric"]
            assert f["sign"] == -r["sign"]
            assert f["a"] == r["b"] and f["b"] == r["a"]

    def test_mismatched_sessions_exit_one(self, capsys, tmp_path):
        a = self._results(capsys, tmp_path, "static_mobile_env_ref", 1, "a")
        b = self._results(
            capsys, tmp_path, "static_mobile_env_ref", 1, "b", strategy="body-fixed"
        )
        code, _, err = run_cli(capsys, "compare", str(a), str(b))
        assert code == 1
        assert "different sessions" in err

    def test_malformed_json_exits_two(self, capsys, tmp_path):
        good = self._results(capsys, tmp_path, "static_mobile_env_ref", 1, "a")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(capsys, "compare", str(good), str(bad))
        assert code == 2
        assert "malformed" in err

    def test_missing_file_exits_two(self, capsys, tmp_path):
        good = self._results(capsys, tmp_path, "static_mobile_env_ref", 1, "a")
        code, _, err = run_cli(capsys, "compare", str(good), str(tmp_path / "nope.json"))
        assert code == 2

    def test_compare_results_equal_inputs_all_zero(self, capsys, tmp_path):
        a = self._results(capsys, tmp_path, "static_stationary_env_ref", 5, "a")
        text = a.read_text()
        report = compare_results(text, text)
        assert all(c["sign"] == 0 for c in report["comparisons"])

    def test_compare_results_raises_on_key_mismatch(self):
        empty = json.dumps({"meta": {}, "summaries": [], "trials": []})
        one = json.dumps(
            {
                "meta": {},
                "summaries": [
                    {
                        "context": "static_mobile",
                        "strategy": "body_fixed",
                        "seed": 1,
                        "trials": 6,
                        "nav_time_mean_s": 1.0,
                        "nav_time_median_s": 1.0,
                        "nav_time_sd_s": 0.0,
                        "switches_mean": 0.0,
                        "switches_median": 0.0,
                        "switches_sd": 0.0,
                        "errors_total": 0,
                        "relevant_fraction": 0.5,
                    }
                ],
                "trials": [],
            }
        )
        with pytest.raises(MismatchedScenarios):
            compare_results(empty, one)
