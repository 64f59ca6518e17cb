import runpy
import sys
from pathlib import Path

import pytest

NOTEBOOKS = Path(__file__).resolve().parent.parent / "notebooks"


@pytest.mark.parametrize("name", ["potential_surfaces", "adiabatic_curves", "trimer_binding"])
def test_notebook_runs(name, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", [name, str(tmp_path)])
    runpy.run_path(str(NOTEBOOKS / f"{name}.py"), run_name="__main__")
    assert capsys.readouterr().out
    assert any(tmp_path.rglob("*.csv")) and any(tmp_path.rglob("*.svg"))


def test_correlation_notebook_small_box(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(sys, "argv", ["connected_correlation", str(tmp_path), "24"])
    runpy.run_path(str(NOTEBOOKS / "connected_correlation.py"), run_name="__main__")
    assert "FWHM" in capsys.readouterr().out
