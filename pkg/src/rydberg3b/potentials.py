"""Effective two-body, connected three-body and total polariton potentials.

Values are dimensionless: an energy ``V`` is reported as ``chi * V / alpha**2``
with distances in blockade radii.  For the attractive regime ``C6 * Delta < 0``
the pair term is ``-1 / (1 + r**6)``.

Everything is written in terms of ``w = r**6`` rather than ``chi * V ~ 1/r**6``
so that coincident points (``w = 0``) and far separations (``w = inf``) are
both finite without special-casing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import pair_distances_from_jacobi

ATTRACTIVE = -1.0


def _w(r):
    r = np.abs(np.asarray(r, dtype=float))
    with np.errstate(over="ignore"):
        return r**6


def pair_from_w(w, sign=ATTRACTIVE):
    return sign / (w - sign)


def pair_potential(r, sign=ATTRACTIVE):
    """Dimensionless pair potential at separation ``r`` (blockade radii).

    ``sign`` is the phase of ``C6 * chi``; -1 for the attractive regime, +1 for the
    repulsive one (which has a pole at ``r = 1``), or any unit complex number
    for a lossy detuning.
    """
    return pair_from_w(_w(r), sign)


def three_body_from_w(w12, w13, w23, alpha, sign=ATTRACTIVE):
    with np.errstate(divide="ignore", over="ignore"):
        inv = 1.0 / w12 + 1.0 / w13 + 1.0 / w23
        h = 1.0 / inv  # 0 whenever any pair coincides
    v3 = sign / (3.0 * h - 2.0 * sign)
    total = 0.0
    for w in (w12, w13, w23):
        total = total + v3 + sign * (v3 - 1.0) / (w - sign)
    return alpha * total


def pair_distances(x1, x2, x3):
    """Pair separations ``(r12, r13, r23)`` of three points on a line."""
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    return np.abs(x1 - x2), np.abs(x1 - x3), np.abs(x2 - x3)


def connected_three_body(x1, x2, x3, alpha, sign=ATTRACTIVE):
    """Connected three-body term for scalar (1D) particle positions."""
    r12, r13, r23 = pair_distances(x1, x2, x3)
    return three_body_from_w(_w(r12), _w(r13), _w(r23), alpha, sign)


@dataclass(frozen=True)
class PotentialSample:
    u2_pairs: tuple
    u3_connected: np.ndarray | float
    u_total: np.ndarray | float


def sample_from_distances(r12, r13, r23, alpha, sign=ATTRACTIVE) -> PotentialSample:
    w12, w13, w23 = _w(r12), _w(r13), _w(r23)
    pairs = (pair_from_w(w12, sign), pair_from_w(w13, sign), pair_from_w(w23, sign))
    u3 = three_body_from_w(w12, w13, w23, alpha, sign)
    return PotentialSample(u2_pairs=pairs, u3_connected=u3, u_total=pairs[0] + pairs[1] + pairs[2] + u3)


def total_potential(x1, x2, x3, alpha, sign=ATTRACTIVE) -> PotentialSample:
    return sample_from_distances(*pair_distances(x1, x2, x3), alpha, sign)


def total_potential_vectors(x1, x2, x3, alpha, sign=ATTRACTIVE) -> PotentialSample:
    """As :func:`total_potential` for points in 2 or 3 dimensions; the last
    array axis holds the Cartesian components."""
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in (x1, x2, x3))
    if x1.shape[-1] > 3:
        raise ValueError("at most three spatial dimensions")
    d = lambda a, b: np.linalg.norm(a - b, axis=-1)
    return sample_from_distances(d(x1, x2), d(x1, x3), d(x2, x3), alpha, sign)


def total_from_jacobi(eta, zeta, alpha, sign=ATTRACTIVE):
    """Total dimensionless potential on the relative plane."""
    return sample_from_distances(*pair_distances_from_jacobi(eta, zeta), alpha, sign).u_total


@dataclass(frozen=True)
class PotentialField:
    eta: np.ndarray
    zeta: np.ndarray
    u2_sum: np.ndarray
    u3: np.ndarray
    u_total: np.ndarray
    alpha: float


def potential_on_jacobi_grid(grid, alpha, sign=ATTRACTIVE) -> PotentialField:
    eta, zeta = grid.mesh()
    s = sample_from_distances(*pair_distances_from_jacobi(eta, zeta), alpha, sign)
    u2 = s.u2_pairs[0] + s.u2_pairs[1] + s.u2_pairs[2]
    return PotentialField(eta=grid.eta, zeta=grid.zeta, u2_sum=u2, u3=s.u3_connected,
                          u_total=s.u_total, alpha=alpha)
