"""Command-line surface: exit codes, formats, round-trips, stability."""

import json

import pytest

from zetagap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_holds_exit_zero(capsys):
    code, out, _ = run(capsys, "check", "--u", "0.0909", "--v", "2.13",
                       "--kappa", "8.69")
    assert code == 0
    assert "HOLDS" in out
    assert "2.766" in out


def test_check_fails_exit_one(capsys):
    code, out, _ = run(capsys, "check", "--u", "0.0909", "--v", "2.13",
                       "--kappa", "20")
    assert code == 1
    assert "FAILS" in out


def test_check_invalid_exit_two(capsys):
    code, _, err = run(capsys, "check", "--u", "0", "--v", "2",
                       "--kappa", "8")
    assert code == 2
    assert "invalid input" in err


def test_check_json_round_trip(capsys):
    code, out, _ = run(capsys, "check", "--u", "0.0909", "--v", "2.13",
                       "--kappa", "8.69", "--format", "json")
    assert code == 0
    record = json.loads(out)
    assert out == json.dumps(record, sort_keys=True, indent=2) + "\n"
    assert record["outputs"]["holds"] is True
    assert record["inputs"]["u"] == 0.0909
    assert record["tool_version"]


def test_verify_oracle_small_grid(capsys):
    code, out, _ = run(capsys, "verify-oracle", "--kappa-list", "2,8.69",
                       "--u-list", "0.0909", "--tol", "1e-8")
    assert code == 0
    assert "0 failures" in out
    # D and E rows carry the ratio against A
    assert "D-or-E/A=-0.5" in out or "D-or-E/A=-0.49999" in out


def test_verify_oracle_rejects_zero_kappa(capsys):
    code, _, err = run(capsys, "verify-oracle", "--kappa-list", "0")
    assert code == 2
    assert "kappa" in err


def test_verify_oracle_csv(capsys):
    code, out, _ = run(capsys, "verify-oracle", "--kappa-list", "2",
                       "--u-list", "0.05", "--format", "csv")
    assert code == 0
    header = out.splitlines()[0]
    assert header.startswith("label,kappa,u,oracle,closed_form,rel_err")
    assert len(out.splitlines()) == 11


def test_table_contents_and_byte_stability(capsys):
    code, first, _ = run(capsys, "table")
    assert code == 0
    code, second, _ = run(capsys, "table")
    assert first == second
    lines = first.splitlines()
    assert lines[0] == ("scenario,u,v,kappa,kappa_source,"
                        "gap_multiplier,holds")
    main_row = lines[1].split(",")
    assert main_row[0] == "main" and main_row[6] == "True"
    assert float(main_row[5]) >= 2.766
    hall_row = lines[2].split(",")
    assert round(float(hall_row[5]), 2) == 2.63
    by_name = {ln.split(",")[0]: ln.split(",") for ln in lines[1:]}
    assert float(by_name["ext-0.4999"][5]) >= 3.25
    assert float(by_name["ext-0.55"][5]) >= 3.26 - 1e-3
    assert float(by_name["ext-0.9999"][5]) >= 3.05 - 1e-3
    assert by_name["ext-0.55"][4] == "sup-kappa"


def test_kappa_series_exact_output(capsys):
    code, out, _ = run(capsys, "kappa-series", "--coeff", "A",
                       "--order", "4", "--u-rational", "1/1")
    assert code == 0
    assert "negative powers: 0 (exact)" in out
    assert "kappa^0: 1/8640" in out  # 42/362880 reduced


def test_kappa_series_half_u(capsys):
    code, out, _ = run(capsys, "kappa-series", "--coeff", "A",
                       "--order", "0", "--u-rational", "1/2")
    assert code == 0
    assert "73/2211840" in out
    assert "1/17280" not in out  # not half of the u = 1 value


def test_kappa_series_invalid_coeff(capsys):
    code, _, err = run(capsys, "kappa-series", "--coeff", "Q", "--order", "2")
    assert code == 2


def test_kappa_series_tripwire_exit_three(capsys, monkeypatch):
    from zetagap import cli
    from zetagap.closed_forms import TranscriptionError

    def boom(label, order):
        raise TranscriptionError("A: kappa^-4 coefficient is not zero")

    monkeypatch.setattr(cli, "kappa_taylor", boom)
    code, _, err = run(capsys, "kappa-series", "--coeff", "A", "--order", "2")
    assert code == 3
    assert "cancellation failure" in err


def test_verify_oracle_window_flag(capsys):
    code, out, _ = run(capsys, "verify-oracle", "--kappa-list", "8.69",
                       "--u-list", "0.0909", "--window=-20:8",
                       "--format", "csv")
    assert code == 0
    assert len(out.splitlines()) == 11


def test_verify_oracle_underflowing_window(capsys):
    code, _, err = run(capsys, "verify-oracle", "--kappa-list", "2",
                       "--u-list", "0.05", "--window=-4:8")
    assert code == 2
    assert "window" in err and "deepen" in err


def test_optimize_degenerate(capsys):
    code, out, _ = run(capsys, "optimize", "--u-min", "0.0909",
                       "--u-max", "0.0909", "--v-min", "2.13",
                       "--v-max", "2.13", "--grid-u", "1", "--grid-v", "1",
                       "--refine", "0")
    assert code == 0
    assert "gap_multiplier" in out


def test_optimize_infeasible_exit_one(capsys):
    code, _, err = run(capsys, "optimize", "--u-min", "0.05",
                       "--u-max", "0.06", "--v-min", "40", "--v-max", "41",
                       "--grid-u", "2", "--grid-v", "2", "--refine", "0")
    assert code == 1
    assert "infeasible" in err


def test_a3_small_prime_limit(capsys):
    code, out, _ = run(capsys, "a3", "--prime-limit", "2")
    assert code == 0
    assert "0.203125" in out
    assert "(42/9!) * a3" in out


def test_a3_json(capsys):
    code, out, _ = run(capsys, "a3", "--prime-limit", "1000",
                       "--format", "json")
    record = json.loads(out)
    assert out == json.dumps(record, sort_keys=True, indent=2) + "\n"
    assert record["outputs"]["a3_partial"] == pytest.approx(0.0493, abs=2e-4)
