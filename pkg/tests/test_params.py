import math
import warnings

import pytest

from rydberg3b.params import (FarDetuningWarning, ParameterError, PhysicalParams, derive,
                              dimensionless_mode, lambda_from_optical_depth, load_config)


def test_derived_values_by_hand():
    # Omega = g = 1, Delta = -20, C6 = 1: evaluate each closed form directly
    d = derive(PhysicalParams(omega=1.0, delta=-20.0, g_coupling=1.0, c6=1.0))
    chi = -20.0 / 2.0
    xi = abs(chi) ** (1 / 6)
    mass = 1.0 * 2.0**3 / (2.0 * 1.0 * (-20.0) * 1.0)
    assert d.alpha == pytest.approx(0.5)
    assert d.chi == pytest.approx(chi)
    assert d.xi == pytest.approx(xi)
    assert d.v_group == pytest.approx(0.5)
    assert d.mass == pytest.approx(mass)
    assert d.lam == pytest.approx(abs(0.25 * mass * xi**2 / chi))
    assert d.kappa_xi == pytest.approx(xi * 1.0 / 20.0)
    assert d.sign_regime == -1
    assert d.coherent


def test_alpha_limits():
    assert derive(PhysicalParams(omega=1e-3, delta=-1.0, g_coupling=1.0, c6=1.0)).alpha == pytest.approx(1, abs=1e-5)
    assert derive(PhysicalParams(omega=1.0, delta=-20.0, g_coupling=1e-4, c6=1.0)).alpha == pytest.approx(0, abs=1e-7)


@pytest.mark.parametrize("field", ["omega", "g_coupling", "c6", "c_light", "delta"])
def test_zero_inputs_rejected(field):
    kw = dict(omega=1.0, delta=-20.0, g_coupling=1.0, c6=1.0)
    kw[field] = 0.0
    with pytest.raises(ParameterError, match="non-zero|Delta"):
        derive(PhysicalParams(**kw))


def test_detuning_window():
    with pytest.raises(ParameterError, match="ratio_min"):
        derive(PhysicalParams(omega=1.0, delta=-3.0, g_coupling=1.0, c6=1.0))
    with pytest.warns(FarDetuningWarning):
        derive(PhysicalParams(omega=1.0, delta=-7.0, g_coupling=1.0, c6=1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        derive(PhysicalParams(omega=1.0, delta=-12.0, g_coupling=1.0, c6=1.0))


def test_lossy_detuning_only_for_potentials():
    d = derive(PhysicalParams(omega=1.0, delta=-20.0, g_coupling=1.0, c6=1.0, gamma=2.0))
    assert isinstance(d.chi, complex)
    assert not d.coherent
    with pytest.raises(ParameterError, match="gamma"):
        d.require_solver_regime()
    assert isinstance(d.to_dict()["chi"], list)


def test_repulsive_regime_rejected_by_solvers():
    d = derive(PhysicalParams(omega=1.0, delta=20.0, g_coupling=1.0, c6=1.0))
    assert d.sign_regime == 1
    with pytest.raises(ParameterError):
        d.require_solver_regime()


def test_dimensionless_mode():
    d = dimensionless_mode(0.5, 0.2)
    assert d.kappa_xi == pytest.approx(math.sqrt(0.1))
    assert lambda_from_optical_depth(d.kappa_xi, 0.5) == pytest.approx(0.2)
    for bad in [(-0.1, 0.1), (1.1, 0.1), (0.5, 0.0)]:
        with pytest.raises(ParameterError):
            dimensionless_mode(*bad)


def test_load_config(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[dimensionless]\nalpha = 0.1\nlambda = 0.05\n\n[grid]\nn = 101\nhalf_width = 12.5\n")
    d, opts = load_config(p)
    assert (d.alpha, d.lam) == (0.1, 0.05)
    assert opts == {"grid": {"n": 101, "half_width": 12.5}}

    p.write_text("[physical]\nomega = 1\ndelta = -20\ng_coupling = 1\nc6 = 1\n")
    d, _ = load_config(p)
    assert d.alpha == pytest.approx(0.5)


@pytest.mark.parametrize("text", [
    "[physical]\nomega=1\ndelta=-20\ng_coupling=1\nc6=1\n[dimensionless]\nalpha=1\nlambda=1\n",
    "[grid]\nn=3\n",
    "[dimensionless]\nalpha=1\n",
    "[dimensionless]\nalpha=1\nlambda=1\nbeta=2\n",
])
def test_bad_configs(tmp_path, text):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ParameterError):
        load_config(p)
