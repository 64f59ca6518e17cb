import json
import subprocess
import sys

import numpy as np
import pytest

from rydberg3b.cli import main
from rydberg3b.export import read_csv


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_potential_audit(tmp_path):
    code, out = run(tmp_path, "potential", "--grid-n", "41", "--box-l", "3", "--alpha", "0", "1", "--audit")
    assert code == 0
    res = manifest(out)["results"]
    assert res["alpha1"]["u_total_origin"] == pytest.approx(0.0, abs=1e-12)
    assert res["alpha0"]["u_total_origin"] == pytest.approx(-3.0)
    assert res["alpha0"]["u3_max_abs"] == 0.0
    assert res["alpha1"]["max_orbit_asymmetry"] < 1e-12


def test_adiabatic_channels(tmp_path):
    code, out = run(tmp_path, "adiabatic", "--alpha", "0", "1", "--lambda", "0.5", "--kmax", "12",
                    "--n-rho", "40", "--rho-max", "20")
    assert code == 0
    res = manifest(out)["results"]
    for a in (0, 1):
        assert res[f"alpha{a}"]["attractive_channels"] == ["c0"]
    assert res["alpha0"]["delta0_at_rho_min"] == pytest.approx(-1.5, rel=1e-6)
    assert res["alpha1"]["delta0_at_rho_min"] == pytest.approx(0.0, abs=1e-6)
    cols = read_csv(out / "curves_alpha0.csv")
    assert list(cols)[:2] == ["rho", "Lambda_c0"]


def test_bound_both_methods_agree(tmp_path):
    code, out = run(tmp_path, "bound", "--lambda", "1", "--alpha", "0", "1", "--box-l", "16",
                    "--grid-n", "129", "--leak-tol", "1e-3", "--svg")
    assert code == 0
    e = read_csv(out / "energies.csv")
    assert np.allclose(e["E3_grid"], e["E3_adiabatic"], rtol=1e-2)
    assert e["central_dip"][0] == 0 and e["central_dip"][1] > 0
    assert (out / "wavefunction_alpha1_lambda1.svg").exists()


def test_rerun_is_byte_identical(tmp_path):
    argv = ("bound", "--method", "grid", "--lambda", "1", "--alpha", "0.5", "--box-l", "12", "--grid-n", "81",
            "--leak-tol", "1e-2")
    _, a = run(tmp_path, *argv, name="a")
    _, b = run(tmp_path, *argv, name="b")
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()
    for name in manifest(a)["artifacts"]:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / "timing.json").exists()


def test_exit_codes(tmp_path, capsys):
    assert run(tmp_path, "bound", "--alpha", "2", "--lambda", "1")[0] == 1
    assert run(tmp_path, "bound", "--lambda", "1")[0] == 1
    assert run(tmp_path, "bound", "--alpha", "0", "--lambda", "1", "--config", str(tmp_path / "none.ini"))[0] == 1
    code, _ = run(tmp_path, "bound", "--method", "grid", "--alpha", "0", "--lambda", "0.1", "--box-l", "3",
                  "--grid-n", "31", "--on-leak", "error")
    assert code == 2
    assert "not converged" in capsys.readouterr().err


def test_config_file(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[dimensionless]\nalpha = 0.5\nlambda = 1.0\n")
    code, out = run(tmp_path, "bound", "--method", "adiabatic", "--config", str(ini))
    assert code == 0
    m = manifest(out)
    assert m["parameters"]["alpha"] == [0.5] and m["parameters"]["lambda"] == [1.0]


def test_correlate_small(tmp_path):
    code, out = run(tmp_path, "correlate", "--alpha", "0", "1", "--lambda", "0.1", "--medium-length", "0",
                    "--box-l", "12", "--dt", "0.05")
    assert code == 0
    d = read_csv(out / "g3_alpha1.csv")
    assert np.allclose(d["g3"], 1.0) and np.allclose(d["g3_connected"], 0.0, atol=1e-12)
    code, out = run(tmp_path, "correlate", "--alpha", "0", "--lambda", "0.1", "--medium-length", "1",
                    "--box-l", "16", "--dt", "0.05", "--no-verify", "--svg", name="b")
    assert code == 0
    assert manifest(out)["convergence"]["alpha0"]["n_steps"] > 0


def test_oracle_report(tmp_path):
    code, out = run(tmp_path, "oracle-report")
    assert code == 0
    rows = (out / "oracles.csv").read_text().splitlines()
    assert rows[0].startswith("quantity,value")
    assert any(r.startswith("E3/E2,4,") for r in rows)


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "rydberg3b.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
