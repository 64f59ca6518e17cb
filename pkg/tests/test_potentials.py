import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydberg3b.geometry import symmetry_orbit, to_jacobi
from rydberg3b.potentials import (connected_three_body, pair_potential, potential_on_jacobi_grid,
                                  total_from_jacobi, total_potential, total_potential_vectors)
from rydberg3b.geometry import Grid2D
from rydberg3b.reference import naive_potential, saturation_constants

ALPHAS = [0.0, 0.1, 0.5, 1.0]
pos = st.floats(-20, 20, allow_nan=False)


def test_pair_shape():
    assert pair_potential(0.0) == -1.0
    assert pair_potential(1.0) == -0.5
    assert pair_potential(np.inf) == 0.0
    r = np.linspace(0, 5, 11)
    assert np.allclose(pair_potential(r), -1 / (1 + r**6))


def test_repulsive_sign_has_pole_at_one():
    # u/(1 - u) saturates at -1 for either sign of u
    assert pair_potential(0.0, sign=1) == -1.0
    assert abs(pair_potential(1.0 + 1e-9, sign=1)) > 1e7


def test_hand_value_three_collinear():
    # x = (0, 1, 2) worked out with u = -1/r^6 by hand: S = -2 - 1/64,
    # V3 = S/(3 - 2S), terms (V3 - u)/(1 - u)
    S = -2.0 - 1.0 / 64.0
    V3 = S / (3.0 - 2.0 * S)
    u3 = 2 * (V3 + 1.0) / 2.0 + (V3 + 1.0 / 64.0) / (1.0 + 1.0 / 64.0)
    s = total_potential(0.0, 1.0, 2.0, 1.0)
    assert s.u3_connected == pytest.approx(u3, rel=1e-13)
    assert s.u3_connected == pytest.approx(0.446461538, abs=1e-9)
    assert s.u_total == pytest.approx(-1.0 / 2 - 1.0 / 2 - 1.0 / 65 + u3, rel=1e-13)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_saturation_at_coincidence(alpha):
    s = total_potential(0.3, 0.3, 0.3, alpha)
    ref = saturation_constants(alpha)
    assert s.u2_pairs[0] == pytest.approx(ref["pair"], abs=1e-12)
    assert s.u3_connected == pytest.approx(ref["three_body"], abs=1e-12)
    assert s.u_total == pytest.approx(ref["total"], abs=1e-12)


@settings(max_examples=200)
@given(pos, pos, st.floats(0, 1))
def test_connected_term_vanishes_with_one_far(x1, x2, alpha):
    assert abs(connected_three_body(x1, x2, 1e3, alpha)) < 1e-12


@settings(max_examples=200)
@given(pos, pos, pos, st.floats(0, 1))
def test_agrees_with_naive_transcription(x1, x2, x3, alpha):
    r = (abs(x1 - x2), abs(x1 - x3), abs(x2 - x3))
    if min(r) < 0.05:
        return  # the naive form clips small distances
    pairs, u3 = naive_potential(*r, alpha)
    s = total_potential(x1, x2, x3, alpha)
    assert s.u3_connected == pytest.approx(u3, rel=1e-9, abs=1e-13)
    assert sum(s.u2_pairs) == pytest.approx(pairs, rel=1e-12, abs=1e-15)


@settings(max_examples=100)
@given(pos, pos, pos, st.floats(0, 1))
def test_permutation_invariance(x1, x2, x3, alpha):
    j = to_jacobi(x1, x2, x3)
    vals = [total_from_jacobi(e, z, alpha) for e, z in symmetry_orbit(j.eta, j.zeta)]
    assert np.ptp(vals) < 1e-13


@given(pos, pos, pos, st.floats(0, 1))
def test_translation_invariance(x1, x2, x3, alpha):
    a = total_potential(x1, x2, x3, alpha).u_total
    b = total_potential(x1 + 7.5, x2 + 7.5, x3 + 7.5, alpha).u_total
    assert a == pytest.approx(b, abs=1e-13)


def test_vectors_reduce_to_line():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [2.5, 0.0]])
    a = total_potential_vectors(x[0], x[1], x[2], 0.5).u_total
    b = total_potential(0.0, 1.0, 2.5, 0.5).u_total
    assert a == pytest.approx(b, abs=1e-15)
    with pytest.raises(ValueError):
        total_potential_vectors(np.zeros(4), np.ones(4), np.ones(4), 0.5)


def test_field_on_grid():
    g = Grid2D(3.0, 61)
    f0 = potential_on_jacobi_grid(g, 0.0)
    f1 = potential_on_jacobi_grid(g, 1.0)
    c = 30
    assert np.all(f0.u3 == 0.0)
    assert f1.u_total[c, c] == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(f1.u_total, f1.u2_sum + f1.u3)
    assert np.all(np.isfinite(f1.u_total))
