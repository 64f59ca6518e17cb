import warnings

import numpy as np
import pytest
from scipy.linalg import eigvalsh

from rydberg3b.adiabatic import (ChannelBasis, QuadratureWarning, adiabatic_curves, coupling_matrix,
                                 fourier_coefficients, lowest_delta, numerov_energy, partial_wave_matrix,
                                 solve_radial, trimer_energy)


@pytest.mark.parametrize("rho", [0.3, 2.0, 15.0])
def test_selection_rule_full_circle(rho):
    c, err = fourier_coefficients(rho, 1.0, 0.1, 36, full_circle=True)
    n = np.arange(37)
    assert np.max(np.abs(c[n % 6 != 0])) < 1e-10
    assert np.max(np.abs(c.imag)) < 1e-12
    assert err < 1e-10


def test_sector_rule_matches_full_circle():
    a, _ = fourier_coefficients(5.0, 0.5, 0.3, 48)
    b, _ = fourier_coefficients(5.0, 0.5, 0.3, 48, full_circle=True)
    assert np.allclose(a, b.real, atol=1e-12)


def test_small_rho_limit_is_saturated_potential():
    for alpha in (0.0, 0.5, 1.0):
        c, _ = fourier_coefficients(1e-3, alpha, 0.1, 12)
        assert c[0] == pytest.approx(-3 * (1 - alpha) * 0.1, abs=1e-9)


def test_real_blocks_reproduce_complex_spectrum():
    rho, K = 4.0, 18
    H = partial_wave_matrix(rho, 1.0, 0.2, np.arange(-K, K + 1))
    assert np.allclose(H, H.conj().T)
    full = np.sort(eigvalsh(H))
    basis = ChannelBasis(K, "all", k_per_rho=0.0)
    blocks = coupling_matrix(rho, 1.0, 0.2, basis)
    mine = np.sort(np.concatenate([eigvalsh(A) for _, A in blocks.values()]))
    assert np.allclose(mine[:10], full[:10], atol=1e-10)


def test_curves_shape_and_ordering():
    rho = np.geomspace(0.1, 30, 40)
    cs = adiabatic_curves(ChannelBasis(24), rho, 1.0, 0.1)
    assert cs.lambda_curves.shape == (5, 40)
    assert np.all(np.diff(cs.lambda_curves, axis=0) > 0)  # lowest first in a block
    assert np.all(cs.lambda_curves[1:] > 0)
    assert cs.lambda_curves[0].min() < 0
    assert np.allclose(cs.lambda_curves - cs.delta_curves,
                       (np.array([0, 6, 12, 18, 24])[:, None] ** 2 - 0.25) / rho**2)


def test_kmax_convergence_of_lowest_curve():
    rho = np.array([1.0, 10.0, 40.0])
    a, _ = lowest_delta(rho, 1.0, 0.1, ChannelBasis(36))
    b, _ = lowest_delta(rho, 1.0, 0.1, ChannelBasis(36, k_per_rho=12.0))
    assert np.allclose(a, b, rtol=1e-4)
    # a fixed cutoff converges from above (variational)
    vals = [lowest_delta(rho[1:2], 1.0, 0.1, ChannelBasis(k, k_per_rho=0.0))[0][0] for k in (36, 60, 96)]
    assert vals[0] > vals[1] > vals[2]


def test_no_quadrature_warnings_on_default_run():
    with warnings.catch_warnings():
        warnings.simplefilter("error", QuadratureWarning)
        lowest_delta(np.geomspace(0.05, 400, 30), 1.0, 0.02)


def test_radial_solvers_agree():
    res = trimer_energy(1.0, 1.0)
    e_fd = res["E3"]
    e_nu = numerov_energy(0, res["rho"], res["delta0"] + res["correction"],
                          bracket=(1.05 * e_fd, 0.95 * e_fd), rho_max=res["rho_max"], h=0.01)
    assert e_nu == pytest.approx(e_fd, rel=2e-3)


def test_radial_free_well():
    # -Phi'' + (k^2 - 1/4)/rho^2 Phi - V0 Phi on a disk: Bessel zeros give the levels
    from scipy.special import jn_zeros
    rho = np.geomspace(0.01, 10, 50)
    sol = solve_radial(0, rho, np.full(50, -5.0), rho_max=10.0, h=0.01, threshold=0.0, n_states=2)
    expected = (jn_zeros(0, 2) / 10.0) ** 2 - 5.0
    assert np.allclose(sol.energies, expected, rtol=1e-3)


def test_trimer_energies_order():
    e = {a: trimer_energy(0.1, a)["E3"] for a in (0.0, 0.1, 1.0)}
    e2 = trimer_energy(0.1, 0.0)["E2"]
    assert e[0.0] < e[0.1] < e[1.0] < e2 < 0


def test_basis_validation():
    with pytest.raises(ValueError):
        ChannelBasis(10)
    with pytest.raises(ValueError):
        ChannelBasis(14, "bosonic")
    with pytest.raises(ValueError):
        fourier_coefficients(0.0, 1.0, 0.1, 12)
