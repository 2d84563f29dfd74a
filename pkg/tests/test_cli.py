import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from diophok import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_nonzero_example(capsys):
    code, out, _ = run(capsys, "nonzero", "--field", "gauss", "--a", "0,5")
    assert code == 0
    data = json.loads(out)
    assert data["verified"] is True
    assert data["field"] == "gauss"


def test_nonzero_at_zero_is_domain_error(capsys):
    code, out, err = run(capsys, "nonzero", "--field", "gauss", "--a", "0,0")
    assert code == 1 and out == ""
    assert "Error" in err


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2
    assert "usage" in err


def test_no_subcommand(capsys):
    assert run(capsys)[0] == 2


def test_bad_coordinates_are_usage_errors(capsys):
    assert run(capsys, "nonzero", "--field", "gauss", "--a", "1,x")[0] == 2
    assert run(capsys, "nonzero", "--field", "gauss", "--a", "1,2,3")[0] == 2
    assert run(capsys, "ideal", "mul", "--field", "gauss", "--gens", "2,0")[0] == 2


def test_nonpositive_budget_is_usage_error(capsys):
    assert run(capsys, "--radius", "0", "field", "gauss")[0] == 2


def test_unknown_field_is_domain_error(capsys):
    code, _, err = run(capsys, "field", "nosuchfield")
    assert code == 1 and err


def test_approx_bad_reduction(capsys):
    # y^2 = x^3 - 2 has bad reduction at 2 and 3
    code, out, err = run(capsys, "approx", "--curve", "x3m2", "--k", "1", "--modulus", "2")
    assert code == 1 and out == ""
    assert "BadReduction" in err


def test_approx_certificate(capsys):
    code, out, _ = run(capsys, "approx", "--curve", "x3m2", "--k", "2", "--modulus", "5")
    assert code == 0
    assert json.loads(out)


def test_digit_budget_exit_code(capsys):
    code, _, err = run(capsys, "--max-digits", "3", "approx", "--curve", "x3m2", "--k", "1", "--modulus", "25")
    assert code == 3
    assert "budget" in err


def test_global_options_after_subcommand(capsys):
    a = run(capsys, "--format", "text", "field", "gauss")
    b = run(capsys, "field", "gauss", "--format", "text")
    assert a == b and a[0] == 0
    assert "degree: 2" in a[1].splitlines()


def test_forcing_n(capsys):
    code, out, _ = run(capsys, "forcing", "n", "--ell", "2")
    assert code == 0 and json.loads(out) == {"ell": 2, "n": 47}


def test_forcing_check_positive_instance(capsys):
    # alpha = 60 in Z, I = (prod_{j<=24} (60 - j)), k = 60
    prod = 1
    for j in range(1, 25):
        prod *= 60 - j
    code, out, _ = run(capsys, "forcing", "check", "--field", "Q", "--alpha", "60",
                       "--ideal", str(prod), "--k", "60")
    assert code == 0
    assert json.loads(out)["verdict"] == "alpha_in_base"


def test_ideal_ops(capsys):
    code, out, _ = run(capsys, "ideal", "divides", "--field", "gauss", "--gens", "1,1", "--other", "2,0")
    assert code == 0 and json.loads(out) == {"divides": True}
    code, out, _ = run(capsys, "ideal", "coprime", "--field", "gauss", "--gens", "3,0", "--other", "1,1")
    assert json.loads(out) == {"coprime": True}
    code, out, _ = run(capsys, "ideal", "num-den", "--field", "gauss", "--element", "1/2,1")
    assert code == 0 and set(json.loads(out)) == {"num", "den"}


def test_plan(capsys):
    code, out, _ = run(capsys, "plan", "--field", "zeta8")
    assert code == 0
    p = json.loads(out)
    assert p["intersection"]["catalogue_name"] == "qsqrt2"
    code, _, err = run(capsys, "plan", "--field", "cbrt2")
    assert code == 1 and "Galois" in err


def test_byte_identical_repeat(capsys):
    args = ("--seed", "7", "forcing", "fuzz", "--field", "gauss", "--trials", "3")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == 0
    assert first[1] == second[1]


def test_emit_verify_scalarize(tmp_path, capsys):
    system = tmp_path / "sys.json"
    code, out, _ = run(capsys, "emit", "--predicate", "nonzero", "--field", "gauss", "--output", str(system))
    assert code == 0 and json.loads(out)["written"] == str(system)
    code, out, _ = run(capsys, "nonzero", "--field", "gauss", "--a", "0,5")
    witness = tmp_path / "w.json"
    witness.write_text(json.dumps(json.loads(out)["witness"]))
    code, out, _ = run(capsys, "verify", "--system", str(system), "--witness", str(witness))
    assert code == 0 and json.loads(out) == {"verified": True}
    code, out, _ = run(capsys, "scalarize", "--system", str(system), "--witness", str(witness))
    assert code == 0 and json.loads(out)["witness_verified"] is True


def test_verify_rejects_wrong_witness(tmp_path, capsys):
    system = tmp_path / "sys.json"
    run(capsys, "emit", "--predicate", "nonzero", "--field", "gauss", "--output", str(system))
    _, out, _ = run(capsys, "nonzero", "--field", "gauss", "--a", "0,5")
    w = json.loads(out)["witness"]
    w["a"] = ["0", "7"]  # (x, y) was found for a = 5i
    witness = tmp_path / "w.json"
    witness.write_text(json.dumps(w))
    code, out, _ = run(capsys, "verify", "--system", str(system), "--witness", str(witness))
    assert code == 1 and json.loads(out) == {"verified": False}


def test_missing_file_is_usage_error(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--system", str(tmp_path / "none.json"), "--witness", "x")
    assert code == 2 and "cannot read" in err


def test_catalogue_env_var(tmp_path):
    import diophok
    data = Path(diophok.__file__).parent / "data"
    cat = tmp_path / "cat"
    cat.mkdir()
    fields = json.loads((data / "fields.json").read_text())
    extra = {"name": "qsqrt7", "defining_poly": ["-7", "0", "1"], "integral_basis": [["1", "0"], ["0", "1"]]}
    fields["fields"].append(extra)
    (cat / "fields.json").write_text(json.dumps(fields))
    shutil.copy(data / "curves.json", cat / "curves.json")
    env = {**os.environ, "DIOPHOK_CATALOGUE": str(cat)}
    proc = subprocess.run([sys.executable, "-m", "diophok.cli", "field", "qsqrt7"],
                          capture_output=True, text=True, env=env, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["signature"] == [2, 0]
    proc = subprocess.run([sys.executable, "-m", "diophok.cli", "field", "qsqrt7"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 1


@pytest.mark.parametrize("sub", sorted(cli.COMMANDS))
def test_help_for_every_subcommand(sub):
    with pytest.raises(SystemExit) as exc:
        cli.main([sub, "--help"])
    assert exc.value.code == 0
