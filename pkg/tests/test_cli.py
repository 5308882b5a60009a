from __future__ import annotations

import csv
import io
import subprocess
import sys
from fractions import Fraction

import pytest

from certbound.certify import read_certificate, write_certificate
from certbound.cli import decimal_string, main


def run(capsys, *argv):
    code = main(["-q", *argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def cert_path(tmp_path, capsys):
    path = tmp_path / "k2h1.lkcb"
    code, out, _ = run(capsys, "compute", "--problem", "edit", "--k", "2", "--h", "1", "--iters", "4",
                       "--scale", "100000", "--out", str(path))
    assert code == 0
    assert out.strip() == "bound <= 1.0001"
    return path


def test_compute_and_verify(cert_path, capsys):
    code, out, _ = run(capsys, "verify", "--cert", str(cert_path))
    assert code == 0
    assert out.strip() == "VALID: alpha_2 <= 1.0001"


def test_verify_rejects_lowered_rate(cert_path, tmp_path, capsys):
    cert = read_certificate(cert_path)
    cert.r_num = 24999
    bad = tmp_path / "bad.json"
    write_certificate(cert, bad, "json")
    code, out, _ = run(capsys, "verify", "--cert", str(bad))
    assert code == 2
    assert out.startswith("INVALID: first violation at ordinal 0")
    cert.r_num = 25000
    write_certificate(cert, bad, "json")
    assert run(capsys, "verify", "--cert", str(bad))[1].strip() == "VALID: alpha_2 <= 0.5"


def test_verify_truncated(cert_path, capsys):
    cert_path.write_bytes(cert_path.read_bytes()[:-3])
    assert run(capsys, "verify", "--cert", str(cert_path))[0] == 65


def test_verify_missing_file(tmp_path, capsys):
    assert run(capsys, "verify", "--cert", str(tmp_path / "nope"))[0] == 66


def test_lcs_compute(tmp_path, capsys):
    code, out, _ = run(capsys, "compute", "--problem", "lcs", "--k", "2", "--h", "1", "--iters", "4",
                       "--out", str(tmp_path / "c.json"), "--format", "json")
    assert code == 0
    assert out.strip() == "bound >= 0.4999"
    assert run(capsys, "verify", "--cert", str(tmp_path / "c.json"))[1].strip() == "VALID: gamma_2 >= 0.4999"


@pytest.mark.parametrize("argv", [
    ["compute", "--problem", "edit", "--k", "2"],
    ["compute", "--problem", "foo", "--k", "2", "--h", "1"],
    ["compute", "--problem", "edit", "--k", "x", "--h", "1"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 64


@pytest.mark.parametrize("argv", [
    ["compute", "--problem", "edit", "--k", "1", "--h", "1"],
    ["compute", "--problem", "edit", "--k", "3", "--h", "2", "--backend", "binary"],
    ["compute", "--problem", "edit", "--k", "2", "--h", "2", "--iters", "1"],
    ["compute", "--problem", "edit", "--k", "50", "--h", "6"],
])
def test_invalid_configuration(argv, tmp_path, capsys):
    assert run(capsys, *argv, "--out", str(tmp_path / "x"))[0] == 64


def test_capacity_exit(tmp_path, capsys):
    code, _, err = run(capsys, "compute", "--problem", "lcs", "--k", "4", "--h", "7", "--backend", "dense",
                       "--mem-gb", "0.01", "--out", str(tmp_path / "x"))
    assert code == 3
    assert "capacity" in err


def test_oracle_commands(capsys):
    assert run(capsys, "oracle", "expected", "--problem", "edit", "--s", "a", "--t", "a", "--n", "2",
               "--k", "2")[1].strip() == "8/16 = 0.5"
    assert run(capsys, "oracle", "distance", "kitten", "sitting")[1].strip() == "3"
    assert run(capsys, "oracle", "lcs", "ab", "ba")[1].strip() == "1"
    assert run(capsys, "oracle", "mc", "--problem", "lcs", "--k", "2", "--n", "1")[1].strip() == "1/2 = 0.5 (exact)"
    code, out, _ = run(capsys, "oracle", "decomposition", "--samples", "2000", "--max-len", "6")
    assert code == 0 and "edit_violations=0 lcs_violations=0" in out
    out = run(capsys, "oracle", "mc", "--problem", "edit", "--k", "2", "--n", "50", "--samples", "100")[1]
    assert "+-" in out and "seed 0" in out


def test_table_small(capsys):
    code, out, _ = run(capsys, "table", "--recipe", "lcs-large", "--max-k", "5", "--max-h", "6")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["k"] for r in rows] == ["5"]
    assert rows[0]["bound"] == "0.55686"
    assert rows[0]["ok"] == "true"


def test_table_skips_infeasible_rows(capsys, monkeypatch):
    from certbound import recipes

    monkeypatch.setitem(recipes.RECIPES, "lcs-large", recipes.RECIPES["lcs-large"][-1:])
    code, out, _ = run(capsys, "table", "--recipe", "lcs-large")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["k"] == "1000" and rows[0]["ok"] == "skipped"


def test_decimal_string():
    assert decimal_string(Fraction(10001, 10000), True) == "1.0001"
    assert decimal_string(Fraction(1, 3), True) == "0.333333333334"
    assert decimal_string(Fraction(1, 3), False) == "0.333333333333"
    assert decimal_string(Fraction(-1, 10000), False) == "-0.0001"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "certbound", "-q", "oracle", "distance", "abc", "abd"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1"
