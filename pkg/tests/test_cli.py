import json

import numpy as np
import pytest

from detconvex import cli, selftest
from detconvex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


CERT_FAST = ("--grid-count", "50", "--samples", "20")


class TestCertifyCommand:
    def test_convex_expression_exits_zero(self, capsys):
        code, out, err = run(capsys, "certify", "-f", "-ln(s)", "--dim", "3", *CERT_FAST)
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "CertifiedOnGrid"
        assert doc["failing_points"] == []
        assert "verdict: CertifiedOnGrid" in err

    def test_increasing_function_refuted_with_witness(self, capsys):
        code, out, _ = run(capsys, "certify", "-f", "s", "--dim", "3", *CERT_FAST)
        assert code == 1
        doc = json.loads(out)
        assert doc["verdict"] == "Refuted"
        w = doc["witnesses"][0]
        assert w["kind"] == "PositiveFPrime"
        s_star = w["s"]
        assert w["C"] == [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, s_star]]
        assert w["H"] == [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 0.0]]
        assert w["analytic"] == -2.0 * s_star
        assert doc["failing_points"]

    def test_family_spec_certifies(self, capsys):
        code, out, _ = run(
            capsys, "certify", "-f", "family:fa:a=0.5,c=-1,d=0", "--dim", "3", *CERT_FAST
        )
        assert code == 0
        assert json.loads(out)["analytic_convex"] is True

    def test_neo_hooke_annotates_trace_term(self, capsys):
        code, out, _ = run(capsys, "certify", "-f", "family:neohooke:mu=2.0", *CERT_FAST)
        assert code == 0
        doc = json.loads(out)
        assert any("trace" in note for note in doc["annotations"])

    def test_domain_failure_exits_two(self, capsys):
        code, out, _ = run(capsys, "certify", "-f", "ln(s-1)", *CERT_FAST)
        assert code == 2
        doc = json.loads(out)
        assert doc["verdict"] == "Inconclusive"
        assert any("domain failure" in a for a in doc["annotations"])

    def test_json_schema_fields(self, capsys):
        _, out, _ = run(capsys, "certify", "-f", "-ln(s)", "--no-timestamp", *CERT_FAST)
        doc = json.loads(out)
        expected = {
            "version",
            "function_source",
            "n",
            "grid",
            "tol",
            "verdict",
            "failing_points",
            "witnesses",
            "diagnostics",
            "analytic_convex",
            "annotations",
            "seed",
            "rng",
        }
        assert set(doc) == expected
        assert set(doc["grid"]) == {"s_min", "s_max", "count"}
        assert set(doc["diagnostics"]) == {"samples_run", "samples_skipped", "min_hess_form"}
        assert doc["rng"] == "numpy-pcg64"

    def test_timestamp_present_unless_suppressed(self, capsys):
        _, out, _ = run(capsys, "certify", "-f", "-ln(s)", *CERT_FAST)
        assert "timestamp" in json.loads(out)

    def test_deterministic_bytes_without_timestamp(self, capsys):
        args = ("certify", "-f", "-ln(s)", "--no-timestamp", "--seed", "7", *CERT_FAST)
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_float_round_trip(self, capsys):
        _, out, _ = run(capsys, "certify", "-f", "s", "--no-timestamp", *CERT_FAST)
        doc = json.loads(out)
        assert doc["witnesses"][0]["s"] == 1e-3

    def test_zero_samples_skips_sweep(self, capsys):
        _, out, _ = run(capsys, "certify", "-f", "-ln(s)", "--grid-count", "50", "--samples", "0")
        doc = json.loads(out)
        assert doc["diagnostics"] == {
            "samples_run": 0,
            "samples_skipped": 0,
            "min_hess_form": None,
        }

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(
            capsys, "certify", "-f", "-ln(s)", "--output", str(target), *CERT_FAST
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["verdict"] == "CertifiedOnGrid"


class TestUsageErrors:
    def test_unparseable_function(self, capsys):
        code, _, err = run(capsys, "certify", "-f", "2^^3", *CERT_FAST)
        assert code == 3
        assert "offset" in err

    def test_unknown_identifier(self, capsys):
        code, _, err = run(capsys, "certify", "-f", "2*x", *CERT_FAST)
        assert code == 3

    def test_unknown_family(self, capsys):
        code, _, err = run(capsys, "certify", "-f", "family:mystery:a=1", *CERT_FAST)
        assert code == 3
        assert "unknown family" in err

    def test_malformed_family_params(self, capsys):
        assert run(capsys, "certify", "-f", "family:fa:a")[0] == 3
        assert run(capsys, "certify", "-f", "family:fa:a=zzz")[0] == 3
        assert run(capsys, "certify", "-f", "family:fa:q=1")[0] == 3
        assert run(capsys, "certify", "-f", "family:fa:c=-1")[0] == 3  # a required

    def test_invalid_family_parameters(self, capsys):
        code, _, err = run(capsys, "certify", "-f", "family:fa:a=-1,c=-1,d=0")
        assert code == 3

    def test_missing_function_flag(self, capsys):
        assert run(capsys, "certify")[0] == 3

    def test_bad_numeric_argument(self, capsys):
        assert run(capsys, "certify", "-f", "s", "--dim", "three")[0] == 3

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 3

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "certify", "-f", "s", "--s-min", "-1")
        assert code == 3

    def test_negative_samples_rejected(self, capsys):
        assert run(capsys, "certify", "-f", "s", "--samples", "-5")[0] == 3


class TestWitnessCommand:
    def test_prints_pair_for_violation(self, capsys):
        code, out, _ = run(capsys, "witness", "-f", "s", "--grid-count", "50")
        assert code == 0
        assert "kind=PositiveFPrime" in out
        assert "C =" in out and "H =" in out
        assert "confirmed: yes" in out

    def test_second_order_kind(self, capsys):
        code, out, _ = run(capsys, "witness", "-f", "-s", "--grid-count", "50")
        assert code == 0
        assert "kind=SecondOrderDeficit" in out

    def test_no_violation_message(self, capsys):
        code, out, _ = run(capsys, "witness", "-f", "-ln(s)", "--grid-count", "50")
        assert code == 0
        assert "no violation found on grid" in out


class TestCurvesCommand:
    def test_writes_standard_set(self, capsys, tmp_path):
        outdir = tmp_path / "curves"
        code, out, _ = run(capsys, "curves", "--outdir", str(outdir), "--count", "20")
        assert code == 0
        files = sorted(outdir.glob("*.csv"))
        assert len(files) == 4
        text = files[0].read_text()
        assert text.splitlines()[1] == "x,y"

    def test_extra_family_member(self, capsys, tmp_path):
        outdir = tmp_path / "curves"
        code, _, _ = run(
            capsys,
            "curves",
            "-f",
            "family:fa:a=0.9,c=-1,d=0",
            "--outdir",
            str(outdir),
            "--count",
            "20",
        )
        assert code == 0
        assert len(list(outdir.glob("*.csv"))) == 5

    def test_deterministic_output(self, capsys, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        run(capsys, "curves", "--outdir", str(d1), "--count", "30")
        run(capsys, "curves", "--outdir", str(d2), "--count", "30")
        for f1, f2 in zip(sorted(d1.glob("*.csv")), sorted(d2.glob("*.csv"))):
            assert f1.read_bytes() == f2.read_bytes()

    def test_expression_rejected(self, capsys, tmp_path):
        code, _, err = run(capsys, "curves", "-f", "-ln(s)", "--outdir", str(tmp_path / "x"))
        assert code == 3


class TestOracleCommand:
    def test_builtin_sweep(self, capsys):
        code, out, _ = run(capsys, "oracle", "--dim", "2", "--samples", "60")
        assert code == 0
        assert "hess discrepancy" in out
        assert "grad discrepancy" in out

    def test_explicit_function(self, capsys):
        code, out, _ = run(capsys, "oracle", "-f", "-ln(s)", "--dim", "3", "--samples", "40")
        assert code == 0


class TestSelftestCommand:
    def test_wiring_and_exit_codes(self, capsys, monkeypatch):
        ok = lambda: selftest.CheckResult("c00", "stub pass", True, "fine")
        bad = lambda: selftest.CheckResult("c99", "stub fail", False, "broken")
        monkeypatch.setattr(selftest, "ALL_CHECKS", (ok,))
        code, out, _ = run(capsys, "selftest")
        assert code == 0
        assert "[PASS] c00" in out
        monkeypatch.setattr(selftest, "ALL_CHECKS", (ok, bad))
        code, out, _ = run(capsys, "selftest")
        assert code == 1
        assert "[FAIL] c99" in out
