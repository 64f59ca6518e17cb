"""Jacobi and hyperspherical coordinates for three particles on a line, the
permutation action on the relative plane, and uniform grids.

All lengths are in units of the blockade radius.  The Jacobi map

    R    = (x1 + x2 + x3) / sqrt(3)
    eta  = (x1 - x2) / sqrt(2)
    zeta = sqrt(2/3) * ((x1 + x2) / 2 - x3)

is orthogonal, so the kinetic operator keeps unit coefficients in every
coordinate and the centre of mass separates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)

# rows: R, eta, zeta; columns: x1, x2, x3
JACOBI_MATRIX = np.array([
    [1.0 / SQRT3, 1.0 / SQRT3, 1.0 / SQRT3],
    [1.0 / SQRT2, -1.0 / SQRT2, 0.0],
    [1.0 / np.sqrt(6.0), 1.0 / np.sqrt(6.0), -2.0 / np.sqrt(6.0)],
])


@dataclass(frozen=True)
class JacobiCoords:
    R: np.ndarray | float
    eta: np.ndarray | float
    zeta: np.ndarray | float


@dataclass(frozen=True)
class Hyperspherical:
    rho: np.ndarray | float
    theta: np.ndarray | float


def to_jacobi(x1, x2, x3) -> JacobiCoords:
    x = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, x3))))
    R, eta, zeta = np.tensordot(JACOBI_MATRIX, x, axes=1)
    return JacobiCoords(R=R, eta=eta, zeta=zeta)


def from_jacobi(R, eta, zeta):
    """Inverse of :func:`to_jacobi`; returns ``(x1, x2, x3)``."""
    j = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (R, eta, zeta))))
    x1, x2, x3 = np.tensordot(JACOBI_MATRIX.T, j, axes=1)
    return x1, x2, x3


def to_hyperspherical(eta, zeta) -> Hyperspherical:
    """``eta = rho sin(theta)``, ``zeta = rho cos(theta)``, theta in [0, 2 pi)."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    rho = np.hypot(eta, zeta)
    theta = np.mod(np.arctan2(eta, zeta), 2.0 * np.pi)
    return Hyperspherical(rho=rho, theta=theta)


def from_hyperspherical(rho, theta):
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return rho * np.sin(theta), rho * np.cos(theta)


def pair_distances_from_jacobi(eta, zeta):
    """Pair separations ``(r12, r13, r23)`` of a relative configuration."""
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    r12 = SQRT2 * np.abs(eta)
    r13 = np.abs(eta / SQRT2 + np.sqrt(1.5) * zeta)
    r23 = np.abs(-eta / SQRT2 + np.sqrt(1.5) * zeta)
    return r12, r13, r23


def _permutation_matrices() -> list[np.ndarray]:
    # 2x2 action on (eta, zeta) induced by relabelling the particles
    rel = JACOBI_MATRIX[1:]
    mats = []
    for perm in itertools.permutations(range(3)):
        P = np.eye(3)[list(perm)]
        mats.append(rel @ P @ rel.T)
    return mats


PERMUTATION_MATRICES = _permutation_matrices()


def symmetry_orbit(eta, zeta) -> np.ndarray:
    """The six permutation images of ``(eta, zeta)``, shape ``(6, 2, ...)``.

    The first image is the point itself.
    """
    v = np.stack(np.broadcast_arrays(np.asarray(eta, float), np.asarray(zeta, float)))
    return np.stack([np.tensordot(M, v, axes=1) for M in PERMUTATION_MATRICES])


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on ``[-L, L]`` with ``n`` nodes including both ends."""

    half_width: float
    n_points: int

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError(f"need at least 16 grid points, got {self.n_points}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_points)

    @classmethod
    def from_spacing(cls, half_width: float, spacing: float) -> "Grid1D":
        n = int(np.ceil(2.0 * half_width / spacing)) + 1
        return cls(half_width, n)

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "n_points": self.n_points, "spacing": self.spacing}


@dataclass(frozen=True)
class Grid2D:
    """Square uniform grid on ``[-L, L]^2`` in ``(eta, zeta)``.

    Nodes include the edges; eigen-solvers impose Dirichlet conditions there.
    An odd ``n_points`` puts a node on each axis, which the even-parity
    quadrant reduction of the solvers requires.
    """

    half_width: float
    n_points: int
    _axis: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError(f"need at least 16 grid points per axis, got {self.n_points}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        object.__setattr__(self, "_axis", np.linspace(-self.half_width, self.half_width, self.n_points))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def eta(self) -> np.ndarray:
        return self._axis

    @property
    def zeta(self) -> np.ndarray:
        return self._axis

    def mesh(self):
        """``(eta, zeta)`` arrays with ``indexing='ij'`` (eta along axis 0)."""
        return np.meshgrid(self._axis, self._axis, indexing="ij")

    @classmethod
    def from_spacing(cls, half_width: float, spacing: float) -> "Grid2D":
        n = int(np.ceil(2.0 * half_width / spacing)) + 1
        if n % 2 == 0:
            n += 1
        return cls(half_width, n)

    @classmethod
    def default(cls, lam: float) -> "Grid2D":
        # weakly bound states extend far beyond the blockade radius
        if lam <= 0.2:
            return cls.from_spacing(60.0, 0.4)
        return cls.from_spacing(20.0, 0.1)

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "n_points": self.n_points, "spacing": self.spacing}
