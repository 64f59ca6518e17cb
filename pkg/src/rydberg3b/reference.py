"""Independent oracles.

Everything here is deliberately naive: dense matrices assembled entry by
entry from Kronecker products, plain adaptive quadrature, closed forms, and a
textbook evaluation of the potentials through ``chi * V = -1/r**6`` with a
small-distance clip.  None of it calls the solver code it is used to check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

MCGUIRE_RATIO = 4.0
DENSE_MAX_POINTS = 64 * 64


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    value: float
    method: str  # analytic | dense-grid | quadrature
    tolerance: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


class OracleDomainError(ValueError):
    pass


def mcguire_ratio(alpha: float = 0.0) -> OracleReport:
    """Trimer to dimer energy ratio for bosons with pairwise delta forces."""
    if alpha != 0.0:
        raise OracleDomainError("the McGuire ratio only applies without three-body forces (alpha = 0)")
    return OracleReport("E3/E2", MCGUIRE_RATIO, "analytic",
                        note="pairwise delta limit: alpha = 0, lambda -> 0")


def pair_integral(tol: float = 1e-13) -> OracleReport:
    """Integral of 1/(1 + r^6) over the whole line by adaptive quadrature."""
    half, err = integrate.quad(lambda r: 1.0 / (1.0 + r**6), 0.0, np.inf, epsabs=tol, epsrel=tol)
    return OracleReport("int dr/(1+r^6)", 2.0 * half, "quadrature", tolerance=2.0 * err,
                        note=f"closed form 2*pi/3 = {2.0 * math.pi / 3.0!r}")


def delta_limit_two_body(lam: float) -> OracleReport:
    """Dimer energy of the equivalent contact interaction.

    With relative kinetic term ``-2 d^2/dr^2`` and a well of integrated
    strength ``lam * 2 pi / 3`` the bound state sits at ``-(strength)^2 / 8``.
    """
    note = ""
    if lam > 0.2:
        note = "outside validity window lambda <= 0.2"
        warnings.warn(f"delta limit used at lambda = {lam} > 0.2", stacklevel=2)
    strength = lam * 2.0 * math.pi / 3.0
    return OracleReport("E2", -strength**2 / 8.0, "analytic", note=note)


def saturation_constants(alpha: float) -> dict:
    """Short-distance limits in units of alpha^2/|chi|."""
    if not 0.0 <= alpha <= 1.0:
        raise OracleDomainError("alpha must lie in [0, 1]")
    return {"pair": -1.0, "three_body": 3.0 * alpha, "total": -3.0 * (1.0 - alpha)}


def naive_potential(r12, r13, r23, alpha, r_min=1e-4):
    """Direct transcription with ``u = chi V = -1/r^6``; returns (pair_sum, u3)."""
    u = [-1.0 / np.maximum(np.abs(np.asarray(r, float)), r_min) ** 6 for r in (r12, r13, r23)]
    S = u[0] + u[1] + u[2]
    V3 = S / (3.0 - 2.0 * S)
    pairs = sum(ui / (1.0 - ui) for ui in u)
    u3 = alpha * sum((V3 - ui) / (1.0 - ui) for ui in u)
    return pairs, u3


def _naive_jacobi_potential(eta, zeta, alpha):
    r12 = math.sqrt(2.0) * np.abs(eta)
    r13 = np.abs(eta / math.sqrt(2.0) + math.sqrt(1.5) * zeta)
    r23 = np.abs(-eta / math.sqrt(2.0) + math.sqrt(1.5) * zeta)
    pairs, u3 = naive_potential(r12, r13, r23, alpha)
    return pairs + u3


def _second_difference(n: int, h: float) -> np.ndarray:
    D = np.zeros((n, n))
    for i in range(n):
        D[i, i] = 2.0
        if i > 0:
            D[i, i - 1] = -1.0
        if i < n - 1:
            D[i, i + 1] = -1.0
    return D / h**2


def dense_two_body_hamiltonian(lam, half_width, n_points):
    """Dirichlet finite differences for ``-d^2/deta^2 + lam U2(sqrt2 eta)`` on
    the interior nodes of an ``n_points`` grid over ``[-L, L]``."""
    x = np.linspace(-half_width, half_width, n_points)[1:-1]
    h = x[1] - x[0]
    V = -lam / (1.0 + (math.sqrt(2.0) * x) ** 6)
    return _second_difference(len(x), h) + np.diag(V), x


def dense_three_body_hamiltonian(lam, alpha, half_width, n_points):
    """Five-point Dirichlet Hamiltonian on the interior of a square grid."""
    x = np.linspace(-half_width, half_width, n_points)[1:-1]
    m = len(x)
    if m * m > DENSE_MAX_POINTS:
        raise MemoryError(f"{m}x{m} interior grid exceeds the dense oracle limit of {DENSE_MAX_POINTS} points")
    h = x[1] - x[0]
    D = _second_difference(m, h)
    I = np.eye(m)
    E, Z = np.meshgrid(x, x, indexing="ij")
    V = lam * _naive_jacobi_potential(E, Z, alpha)
    return np.kron(D, I) + np.kron(I, D) + np.diag(V.ravel()), x


def dense_diagonalize(H: np.ndarray):
    """Full spectrum of a dense Hermitian matrix, ascending."""
    if H.shape[0] > DENSE_MAX_POINTS:
        raise MemoryError("matrix too large for the dense oracle")
    return np.linalg.eigh(H)


def free_stencil_spectrum(half_width, n_points, dim=1):
    """Exact eigenvalues of the Dirichlet three-point (or five-point) stencil."""
    m = n_points - 2
    h = 2.0 * half_width / (n_points - 1)
    j = np.arange(1, m + 1)
    ev = 4.0 / h**2 * np.sin(j * math.pi / (2.0 * (m + 1))) ** 2
    if dim == 1:
        return np.sort(ev)
    return np.sort((ev[:, None] + ev[None, :]).ravel())


def cosine_basis(n: int) -> np.ndarray:
    """Orthonormal cosine modes of a cell-centred grid with reflecting ends;
    column ``j`` is mode ``j``."""
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    C = np.cos(math.pi * j * (i + 0.5) / n) * math.sqrt(2.0 / n)
    C[:, 0] = math.sqrt(1.0 / n)
    return C


def dense_quadrant_hamiltonian(lam, alpha, half_width, n_points):
    """Spectral-kinetic Hamiltonian of the reflecting quadrant box used for
    propagation, assembled as a dense matrix."""
    if n_points * n_points > DENSE_MAX_POINTS:
        raise MemoryError("quadrant grid too large for the dense oracle")
    h = half_width / n_points
    x = (np.arange(n_points) + 0.5) * h
    C = cosine_basis(n_points)
    k2 = (math.pi * np.arange(n_points) / half_width) ** 2
    T1 = C @ np.diag(k2) @ C.T
    I = np.eye(n_points)
    E, Z = np.meshgrid(x, x, indexing="ij")
    V = lam * _naive_jacobi_potential(E, Z, alpha)
    return np.kron(T1, I) + np.kron(I, T1) + np.diag(V.ravel()), x


def eigen_expansion_evolve(H: np.ndarray, psi0: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-i H tau) psi0`` through the full eigendecomposition of ``H``."""
    E, U = dense_diagonalize(H)
    coeff = U.T @ psi0.ravel()
    return (U @ (np.exp(-1j * E * tau) * coeff)).reshape(psi0.shape)
