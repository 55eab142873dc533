"""Command-line surface: flags, report shapes, exit codes, stability."""

import csv
import io
import json
import math

import pytest

from polyrad import cli, suite


def run_cli(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerifyPolyharmonic:
    def test_passes_with_json(self, capsys):
        code, out, _ = run_cli(["verify-polyharmonic", "--max-m", "8"], capsys)
        assert code == 0
        report = json.loads(out)
        assert report["schema_version"] == 1
        assert report["passed"] is True
        assert [r["m"] for r in report["results"]] == list(range(1, 9))
        assert all(r["exact"] for r in report["results"])


class TestBestConstant:
    def test_value_and_cross_check(self, capsys):
        code, out, _ = run_cli(
            ["best-constant", "--m", "1", "--alpha", "3", "--cross-check"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert abs(report["S"] - 4.0 / math.sqrt(3.0)) <= 1e-10
        assert report["route"] == "closed_form"
        assert report["cross_check"]["agrees"] is True
        assert report["cross_check"]["rel_diff"] <= 1e-10

    def test_sobolev_violation_exits_2(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["best-constant", "--m", "2", "--alpha", "2"])
        assert info.value.code == 2
        assert "Sobolev condition" in capsys.readouterr().err

    def test_twelve_digit_rounding(self, capsys):
        _, out, _ = run_cli(["best-constant", "--m", "2", "--alpha", "4"], capsys)
        value = json.loads(out)["S"]
        assert value == float(f"{value:.12g}")


class TestCoeffTable:
    def test_byte_stable(self, capsys):
        _, out1, _ = run_cli(["coeff-table", "--m", "3"], capsys)
        _, out2, _ = run_cli(["coeff-table", "--m", "3"], capsys)
        assert out1 == out2

    def test_matches_golden(self, capsys):
        _, out, _ = run_cli(["coeff-table", "--m", "3"], capsys)
        with open(suite.golden_table_path(), "r", encoding="utf-8") as handle:
            assert out == handle.read()

    def test_polynomials_as_rational_strings(self, capsys):
        _, out, _ = run_cli(["coeff-table", "--m", "2"], capsys)
        table = json.loads(out)
        entry = {(e["i"], e["j"]): e["coeff"] for e in table["g_entries"]}
        assert entry[0, 1] == ["-3", "-2", "1"]  # (a-3)(a+1)


class TestRayleigh:
    def test_csv_sweep(self, capsys):
        code, out, _ = run_cli(
            ["rayleigh", "--m", "1", "--alpha", "3", "--eps-list", "0.5,1,2"], capsys
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["epsilon"] for r in rows] == ["0.5", "1", "2"]
        for row in rows:
            assert float(row["rel_diff"]) <= 1e-6
            assert abs(float(row["quotient"]) - float(row["S_closed_form"])) <= 1e-5

    def test_perturb_rows(self, capsys):
        code, out, _ = run_cli(
            ["rayleigh", "--m", "1", "--alpha", "3", "--eps-list", "1",
             "--perturb", "--perturb-amplitude", "0.05"], capsys
        )
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 11
        probes = [r for r in rows if r["epsilon"].startswith("probe")]
        assert len(probes) == 10
        assert all(float(r["rel_diff"]) >= -1e-6 for r in probes)


class TestIterate:
    def test_writes_chain_and_summary(self, capsys, tmp_path):
        code, out, _ = run_cli(
            ["iterate", "--m", "2", "--alpha", "4", "--output-dir", str(tmp_path)],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert report["checks"]["q_sequence_closed_form"] is True
        assert report["checks"]["fixed_point_residual"] <= 1e-3
        for k in range(3):
            path = tmp_path / f"chain_k{k}.csv"
            rows = list(csv.DictReader(path.open()))
            assert len(rows) == 4096
            assert set(rows[0]) == {"r", f"w_{k}"}


class TestClassify:
    def test_family_member(self, capsys):
        code, out, _ = run_cli(
            ["classify", "--m", "1", "--alpha", "3", "--eps", "0.5",
             "--r-max", "20"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "coincides"
        assert report["max_rel_dev"] <= 1e-6
        assert report["steps"] > 0

    def test_perturbed_departs(self, capsys):
        code, out, _ = run_cli(
            ["classify", "--m", "2", "--alpha", "4", "--perturb-index", "1",
             "--perturb-scale", "1.05"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["verdict"] == "departs"
        assert report["departure"] >= 0.01

    def test_perturb_index_validated(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["classify", "--m", "2", "--alpha", "4",
                      "--perturb-index", "5"])
        assert info.value.code == 2


class TestVerifyAll:
    def test_quick_passes(self, capsys):
        code, out, _ = run_cli(["verify-all", "--quick"], capsys)
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("[PASS]")]
        assert len(lines) == 12  # eleven criteria plus the golden artifact

    def test_corrupted_golden_fails_naming_artifact(self, capsys, tmp_path):
        bad = tmp_path / "coeff_table_m3.json"
        text = suite.coeff_table_json(suite.GOLDEN_TABLE_M)
        bad.write_text(text.replace('"-5"', '"-4"', 1), encoding="utf-8")
        code, out, err = run_cli(
            ["verify-all", "--quick", "--golden", str(bad)], capsys
        )
        assert code == 1
        assert "[FAIL]" in out
        assert str(bad) in err  # failure names the mismatched artifact

    def test_threads_env_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("POLYRAD_THREADS", "2")
        assert suite.thread_cap() == 2
        code, _, _ = run_cli(["verify-all", "--quick"], capsys)
        assert code == 0

    def test_report_written_to_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, _, _ = run_cli(
            ["verify-all", "--quick", "--output", str(path)], capsys
        )
        assert code == 0
        report = json.loads(path.read_text())
        assert report["passed"] is True
        assert {c["criterion"] for c in report["checks"]} == set(range(12))


def test_verify_polyharmonic_byte_stable(capsys):
    _, out1, _ = run_cli(["verify-polyharmonic"], capsys)
    _, out2, _ = run_cli(["verify-polyharmonic"], capsys)
    assert out1 == out2


def test_run_config_dispatch(capsys):
    config = cli.RunConfig(subcommand="coeff-table", options={"m": 1})
    assert cli.run(config) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["m"] == 1
