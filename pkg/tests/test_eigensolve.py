import numpy as np
import pytest

from rydberg3b import reference as ref
from rydberg3b.eigensolve import (auto_grid_2d, central_dip_depth, count_below, delta_limit_energy,
                                  ratio_scan, three_body_ground, three_body_hamiltonian, two_body_ground)
from rydberg3b.geometry import Grid1D, Grid2D
from rydberg3b.solution import BoxTooSmallError


def test_two_body_matches_dense_oracle():
    H, _ = ref.dense_two_body_hamiltonian(1.0, 20.0, 801)
    e_dense = ref.dense_diagonalize(H)[0][:3]
    sol = two_body_ground(1.0, Grid1D(20.0, 801), n_states=3)
    assert np.allclose(sol.energies, e_dense, atol=1e-8)
    assert np.all(sol.residuals < 1e-10)


def test_two_body_delta_limit():
    e = two_body_ground(0.05).ground_energy
    assert e == pytest.approx(ref.delta_limit_two_body(0.05).value, rel=0.10)
    assert e < 0


def test_two_body_normalised_and_even():
    sol = two_body_ground(0.3)
    psi, h = sol.ground_state, sol.grid["spacing"]
    assert np.sum(psi**2) * h == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(psi, psi[::-1], atol=1e-10)


def test_leak_detection():
    with pytest.raises(BoxTooSmallError):
        two_body_ground(1.0, Grid1D(5.0, 201))
    sol = two_body_ground(1.0, Grid1D(5.0, 201), on_leak="enlarge")
    assert sol.grid["half_width"] > 5.0
    assert sol.meta["edge_ratio"] < 1e-6
    with pytest.raises(BoxTooSmallError):
        three_body_ground(1.0, 0.0, Grid2D(4.0, 41))


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_three_body_matches_dense_oracle(alpha):
    # identical Dirichlet grid, 39 x 39 interior nodes
    L, n = 8.0, 41
    H, _ = ref.dense_three_body_hamiltonian(1.0, alpha, L, n)
    e_dense = ref.dense_diagonalize(H)[0][0]
    full = three_body_ground(1.0, alpha, Grid2D(L, n), symmetry="none", leak_tol=np.inf)
    even = three_body_ground(1.0, alpha, Grid2D(L, n), symmetry="even", leak_tol=np.inf)
    assert full.ground_energy == pytest.approx(e_dense, abs=1e-8)
    assert even.ground_energy == pytest.approx(e_dense, abs=1e-8)


def test_quadrant_reduction_is_symmetric():
    H, axis, w = three_body_hamiltonian(0.7, 0.5, Grid2D(5.0, 41), symmetry="even")
    assert abs(H - H.T).max() < 1e-12
    assert count_below(H, -100.0)[0] == 0
    assert count_below(H, 0.0)[0] >= 1


def test_three_body_bound_and_dip():
    sol0 = three_body_ground(1.0, 0.0)
    sol1 = three_body_ground(1.0, 1.0)
    e2 = sol0.meta["e2"]
    assert sol0.ground_energy < sol1.ground_energy < e2 < 0
    assert sol0.meta["bound"][0] and sol1.meta["bound"][0]
    assert central_dip_depth(sol1) > 0.05
    assert central_dip_depth(sol0) == 0.0
    assert sol1.residuals[0] < 1e-8
    psi = sol1.ground_state
    assert np.allclose(psi, psi[::-1, :], atol=1e-8)
    assert np.allclose(psi, psi[:, ::-1], atol=1e-8)


def test_auto_grid_grows_for_weak_binding():
    assert auto_grid_2d(0.1).half_width > auto_grid_2d(1.0).half_width
    assert delta_limit_energy(0.05) == pytest.approx(-1.3707e-3, rel=1e-4)


def test_scan_records_failures():
    res = ratio_scan([1.0], [0.0, 1.0], method="adiabatic")
    assert res.ratio.shape == (2, 1)
    assert res.ratio[0, 0] > res.ratio[1, 0] > 1
    rows = list(res.rows())
    assert {r["alpha"] for r in rows} == {0.0, 1.0}
    with pytest.raises(ValueError):
        ratio_scan([], [0.0])
