import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydberg3b.geometry import (JACOBI_MATRIX, Grid1D, Grid2D, from_hyperspherical, from_jacobi,
                                pair_distances_from_jacobi, symmetry_orbit, to_hyperspherical, to_jacobi)

coord = st.floats(-50, 50, allow_nan=False)


def test_jacobi_matrix_orthogonal():
    assert np.allclose(JACOBI_MATRIX @ JACOBI_MATRIX.T, np.eye(3), atol=1e-15)


@given(coord, coord, coord)
def test_round_trip_and_distances(x1, x2, x3):
    j = to_jacobi(x1, x2, x3)
    assert np.allclose(from_jacobi(j.R, j.eta, j.zeta), (x1, x2, x3), atol=1e-10)
    r = pair_distances_from_jacobi(j.eta, j.zeta)
    assert np.allclose(r, (abs(x1 - x2), abs(x1 - x3), abs(x2 - x3)), atol=1e-10)


@given(st.floats(0, 100), st.floats(0, 2 * np.pi, exclude_max=True))
def test_hyperspherical_round_trip(rho, theta):
    eta, zeta = from_hyperspherical(rho, theta)
    h = to_hyperspherical(eta, zeta)
    assert h.rho == pytest.approx(rho, abs=1e-12)
    if rho > 1e-6:
        d = abs(h.theta - theta)
        assert min(d, 2 * np.pi - d) < 1e-9


def test_ridges_every_sixty_degrees():
    theta = np.arange(6) * np.pi / 3
    eta, zeta = from_hyperspherical(1.0, theta)
    r = np.array(pair_distances_from_jacobi(eta, zeta))
    assert np.all(r.min(axis=0) < 1e-12)


@settings(max_examples=50)
@given(coord, coord, coord)
def test_orbit_matches_particle_relabelling(x1, x2, x3):
    j = to_jacobi(x1, x2, x3)
    orbit = symmetry_orbit(j.eta, j.zeta)
    expected = []
    for perm in itertools.permutations((x1, x2, x3)):
        jp = to_jacobi(*perm)
        expected.append((jp.eta, jp.zeta))
    assert np.allclose(orbit, np.array(expected), atol=1e-9)
    assert np.allclose(orbit[0], (j.eta, j.zeta))


def test_grids():
    g = Grid1D.from_spacing(10.0, 0.1)
    assert g.axis[0] == -10.0 and g.axis[-1] == 10.0
    assert g.spacing <= 0.1 + 1e-12
    G = Grid2D.from_spacing(5.0, 0.2)
    assert G.n_points % 2 == 1
    eta, zeta = G.mesh()
    assert eta.shape == (G.n_points, G.n_points)
    assert np.all(eta[:, 0] == G.eta)
    with pytest.raises(ValueError):
        Grid2D(1.0, 8)
    with pytest.raises(ValueError):
        Grid1D(-1.0, 32)
