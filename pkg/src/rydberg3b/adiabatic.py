"""Hyperspherical adiabatic treatment of the relative three-body problem.

With ``eta = rho sin(theta)``, ``zeta = rho cos(theta)`` and
``psi = sum_k Phi_k(rho) / sqrt(rho) * exp(i k theta) / sqrt(2 pi)`` the
relative Hamiltonian becomes a set of radial equations coupled through the
angular Fourier coefficients ``c_n(rho)`` of the potential.  At fixed ``rho``
the angular matrix

    A_kk'(rho) = k^2 / rho^2 delta_kk' + lam * c_{k-k'}(rho)

is diagonalised; its eigenvalues ``eps`` give the adiabatic curves
``Lambda = eps - 1/(4 rho^2)`` and effective potentials
``Delta_k = eps - k^2/rho^2``.

The potential has period pi/3 in theta and is even under theta -> -theta, so
``c_n`` is real, even in ``n`` and vanishes unless 6 divides ``n``.  The
matrices are therefore built in the real cos/sin basis and split into
blocks that never couple; within a block the curves are labelled by energy
order (avoided crossings keep the adiabatic label).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import brentq

from .eigensolve import delta_limit_energy, two_body_ground
from .potentials import total_from_jacobi
from .solution import EigenSolution


class QuadratureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ChannelBasis:
    """Partial waves kept in the angular expansion.

    ``sector='bosonic'`` keeps ``cos(k theta)`` with ``k = 0, 6, 12, ...``,
    the only waves that couple to ``k = 0`` under the symmetry of the
    potential.  ``sector='all'`` keeps ``cos`` and ``sin`` for every
    ``0 <= k <= k_max``.

    The potential narrows in angle as ``1/rho``; the effective cutoff grows
    as ``max(k_max, k_per_rho * rho)`` so the pair cores stay resolved.
    """

    k_max: int = 36
    sector: str = "bosonic"
    k_per_rho: float = 4.0

    def __post_init__(self):
        if self.k_max < 12:
            raise ValueError("k_max must be at least 12")
        if self.sector not in ("bosonic", "all"):
            raise ValueError(f"unknown sector {self.sector!r}")
        if self.sector == "bosonic" and self.k_max % 6:
            raise ValueError("bosonic basis needs k_max divisible by 6")

    def k_max_at(self, rho: float) -> int:
        k = max(self.k_max, int(math.ceil(self.k_per_rho * rho)))
        if self.sector == "bosonic":
            k = 6 * int(math.ceil(k / 6))
        return k

    def channels(self, rho: float | None = None):
        """``(k, parity)`` labels, parity ``'c'`` (cos) or ``'s'`` (sin)."""
        kmax = self.k_max if rho is None else self.k_max_at(rho)
        if self.sector == "bosonic":
            return [(k, "c") for k in range(0, kmax + 1, 6)]
        return [(k, "c") for k in range(kmax + 1)] + [(k, "s") for k in range(1, kmax + 1)]


def _n_theta(rho, n_max, n_theta):
    # per pi/3 sector; FFT yields c_{6m} for m < N/2
    need = max(n_theta, 2 * (n_max // 6) + 8, int(20 * rho))
    return 1 << int(math.ceil(math.log2(need)))


def fourier_coefficients(rho: float, alpha: float, lam: float, n_max: int,
                         n_theta: int = 512, full_circle: bool = False):
    """Angular Fourier coefficients ``lam * c_n(rho)`` for ``0 <= n <= n_max``.

    Trapezoidal quadrature over one pi/3 sector (or the full circle when
    ``full_circle`` is set, which also returns the imaginary parts and the
    coefficients that symmetry forces to zero).  The error estimate compares
    against the same rule with half the nodes.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    N = _n_theta(rho, n_max, n_theta)
    if full_circle:
        M = 6 * N
        theta = np.arange(M) * (2.0 * np.pi / M)
        U = lam * total_from_jacobi(rho * np.sin(theta), rho * np.cos(theta), alpha)
        c = np.fft.fft(U) / M
        c_half = np.fft.fft(U[::2]) / (M // 2)
        err = float(np.max(np.abs(c[:n_max + 1] - c_half[:n_max + 1])))
        return c[:n_max + 1], err
    theta = np.arange(N) * (np.pi / 3.0 / N)
    U = lam * total_from_jacobi(rho * np.sin(theta), rho * np.cos(theta), alpha)
    c6 = np.fft.rfft(U).real / N
    c6_half = np.fft.rfft(U[::2]).real / (N // 2)
    m_max = n_max // 6
    m = min(m_max + 1, len(c6_half))
    err = float(np.max(np.abs(c6[:m] - c6_half[:m])))
    c = np.zeros(n_max + 1)
    k = min(m_max + 1, len(c6))
    c[0:6 * k:6] = c6[:k]
    return c, err


def partial_wave_matrix(rho: float, alpha: float, lam: float, ks, n_theta: int = 512):
    """Hermitian coupling matrix in the complex basis ``exp(i k theta)``,
    including the ``k^2/rho^2`` diagonal."""
    ks = np.asarray(ks, dtype=int)
    span = int(np.max(ks) - np.min(ks))
    c, _ = fourier_coefficients(rho, alpha, lam, span, n_theta, full_circle=True)
    d = ks[:, None] - ks[None, :]
    C = np.where(d >= 0, c[np.abs(d)], np.conj(c[np.abs(d)]))
    return C + np.diag(ks.astype(float) ** 2 / rho**2)


def _real_block(c, ks, parity, rho):
    ks = np.asarray(ks)
    diff = c[np.abs(ks[:, None] - ks[None, :])]
    summ = c[ks[:, None] + ks[None, :]]
    A = diff + summ if parity == "c" else diff - summ
    if parity == "c" and ks[0] == 0:
        A[0, :] /= math.sqrt(2.0)
        A[:, 0] /= math.sqrt(2.0)
    return A + np.diag(ks.astype(float) ** 2 / rho**2)


def _blocks(channels):
    groups = {}
    for k, p in channels:
        r = k % 6
        groups.setdefault((p, min(r, (6 - r) % 6)), []).append(k)
    return {key: sorted(v) for key, v in groups.items()}


def coupling_matrix(rho: float, alpha: float, lam: float, basis: ChannelBasis, n_theta: int = 512,
                    tol: float = 1e-6):
    """Angular matrices at ``rho`` as ``{(parity, class): (ks, A)}`` blocks.

    ``A`` is real symmetric; for the bosonic sector there is a single block
    ``('c', 0)``.  Warns when the quadrature error estimate exceeds ``tol``
    relative to the largest coefficient.
    """
    kmax = basis.k_max_at(rho)
    c, err = fourier_coefficients(rho, alpha, lam, 2 * kmax, n_theta)
    if err > tol * max(np.abs(c).max(), 1e-300):
        warnings.warn(f"angular quadrature at rho={rho:g}: error estimate {err:.2e}", QuadratureWarning,
                      stacklevel=2)
    return {key: (ks, _real_block(c, ks, key[0], rho)) for key, ks in _blocks(basis.channels(rho)).items()}


@dataclass
class AdiabaticChannelSet:
    rho: np.ndarray
    labels: list            # (k, parity) per curve
    lambda_curves: np.ndarray  # [curve, rho], includes centrifugal term
    delta_curves: np.ndarray   # Lambda - (k^2 - 1/4)/rho^2
    alpha: float
    lam: float

    def curve(self, k: int, parity: str = "c") -> np.ndarray:
        return self.delta_curves[self.labels.index((k, parity))]


def adiabatic_curves(basis: ChannelBasis, rho_grid, alpha: float, lam: float,
                     n_theta: int = 512) -> AdiabaticChannelSet:
    """Adiabatic potentials for every channel with ``k <= basis.k_max``."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(rho_grid <= 0) or np.any(np.diff(rho_grid) <= 0):
        raise ValueError("rho grid must be positive and increasing")
    labels = basis.channels()
    index = {lab: i for i, lab in enumerate(labels)}
    eps = np.full((len(labels), len(rho_grid)), np.nan)
    for j, rho in enumerate(rho_grid):
        for (parity, _), (ks, A) in coupling_matrix(rho, alpha, lam, basis, n_theta).items():
            keep = [k for k in ks if k <= basis.k_max]
            if not keep:
                continue
            w = eigh(A, eigvals_only=True, subset_by_index=[0, len(keep) - 1])
            for k, e in zip(keep, w):
                eps[index[(k, parity)], j] = e
    k2 = np.array([k for k, _ in labels], dtype=float)[:, None] ** 2
    r2 = rho_grid[None, :] ** 2
    return AdiabaticChannelSet(rho=rho_grid, labels=labels, lambda_curves=eps - 0.25 / r2,
                               delta_curves=eps - k2 / r2, alpha=alpha, lam=lam)


def lowest_delta(rho_grid, alpha: float, lam: float, basis: ChannelBasis | None = None,
                 n_theta: int = 512, diagonal_correction: bool = False, drho: float = 1e-3):
    """``Delta_0`` along ``rho_grid`` from the bosonic block only.

    With ``diagonal_correction`` also returns ``<d phi/d rho | d phi/d rho>``
    of the lowest angular eigenvector (zero otherwise).
    """
    basis = basis or ChannelBasis()
    if basis.sector != "bosonic":
        basis = ChannelBasis(6 * int(math.ceil(basis.k_max / 6)), "bosonic", basis.k_per_rho)
    rho_grid = np.asarray(rho_grid, dtype=float)
    delta = np.empty_like(rho_grid)
    corr = np.zeros_like(rho_grid)
    for j, rho in enumerate(rho_grid):
        (_, A), = coupling_matrix(rho, alpha, lam, basis, n_theta).values()
        if not diagonal_correction:
            delta[j] = eigh(A, eigvals_only=True, subset_by_index=[0, 0])[0]
            continue
        w, v = eigh(A, subset_by_index=[0, 0])
        delta[j] = w[0]
        vecs = []
        for r in (rho - drho * rho, rho + drho * rho):
            kmax = basis.k_max_at(rho)
            c, _ = fourier_coefficients(r, alpha, lam, 2 * kmax, n_theta)
            ks = list(range(0, kmax + 1, 6))
            _, u = eigh(_real_block(c, ks, "c", r), subset_by_index=[0, 0])
            vecs.append(u[:, 0] * np.sign(u[:, 0] @ v[:, 0]))
        corr[j] = float(np.sum(((vecs[1] - vecs[0]) / (2.0 * drho * rho)) ** 2))
    return delta, corr


def default_rho_grid(lam: float, n_points: int = 400, rho_min: float = 0.05, rho_max: float | None = None):
    """Geometric grid from ``rho_min`` out to where the trimer tail is gone."""
    if rho_max is None:
        rho_max = max(80.0, 16.0 / math.sqrt(-delta_limit_energy(lam)))
    return np.geomspace(rho_min, rho_max, n_points)


def _radial_operator(k, rho, h, potential):
    rp, rm = rho + 0.5 * h, rho - 0.5 * h
    diag = (rp + rm) / (rho * h * h) + k * k / rho**2 + potential
    off = -rp[:-1] / (h * h * np.sqrt(rho[:-1] * rho[1:]))
    return diag, off


def solve_radial(k: int, rho_grid, delta_curve, rho_max: float | None = None, h: float = 0.05,
                 n_states: int = 1, threshold: float | None = None) -> EigenSolution:
    """Bound states of ``-Phi'' + ((k^2 - 1/4)/rho^2 + Delta_k) Phi = E Phi``.

    ``Delta_k`` is interpolated (cubic in ``log rho``, constant outside the
    tabulated range).  Cell-centred nodes ``rho_i = (i + 1/2) h`` with the
    flux form of the 2D radial Laplacian make ``Phi ~ rho^(1/2)`` regular at
    the origin.  States at or above ``threshold`` (default: the last
    tabulated value of ``Delta_k``) are dropped; the result may be empty.
    """
    rho_grid = np.asarray(rho_grid, dtype=float)
    delta_curve = np.asarray(delta_curve, dtype=float)
    rho_max = rho_max or rho_grid[-1]
    threshold = delta_curve[-1] if threshold is None else threshold
    spline = CubicSpline(np.log(rho_grid), delta_curve)
    n = int(round(rho_max / h))
    rho = (np.arange(n) + 0.5) * h
    pot = spline(np.log(np.clip(rho, rho_grid[0], rho_grid[-1])))
    diag, off = _radial_operator(k, rho, h, pot)
    E, V = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1))
    Hv = diag[:, None] * V
    Hv[:-1] += off[:, None] * V[1:]
    Hv[1:] += off[:, None] * V[:-1]
    residuals = np.linalg.norm(Hv - V * E, axis=0)
    floor = (math.pi / rho_max) ** 2
    keep = E < threshold - 1e-3 * floor
    phi = (V.T / math.sqrt(h))[keep]
    for p in phi:
        p *= np.sign(p[np.argmax(np.abs(p))])
    return EigenSolution(energies=E[keep], wavefunctions=phi, residuals=residuals[keep], axes=(rho,),
                         grid={"rho_max": rho_max, "spacing": h, "n_points": n},
                         meta={"k": k, "threshold": threshold, "solver": "finite-difference"})


def numerov_energy(k: int, rho_grid, delta_curve, bracket, rho_max: float | None = None,
                   h: float = 0.01) -> float:
    """Eigenvalue in ``bracket`` by outward Numerov shooting to a hard wall
    at ``rho_max``; an independent check on :func:`solve_radial`."""
    rho_grid = np.asarray(rho_grid, dtype=float)
    rho_max = rho_max or rho_grid[-1]
    spline = CubicSpline(np.log(rho_grid), np.asarray(delta_curve, dtype=float))
    r = np.arange(1, int(round(rho_max / h)) + 1) * h
    veff = (k * k - 0.25) / r**2 + spline(np.log(np.clip(r, rho_grid[0], rho_grid[-1])))

    def endpoint(E):
        f = 1.0 + h * h * (E - veff) / 12.0
        phi = np.empty_like(r)
        phi[0] = r[0] ** (abs(k) + 0.5)
        phi[1] = r[1] ** (abs(k) + 0.5)
        for i in range(1, len(r) - 1):
            phi[i + 1] = ((12.0 - 10.0 * f[i]) * phi[i] - f[i - 1] * phi[i - 1]) / f[i + 1]
            if abs(phi[i + 1]) > 1e200:
                phi[: i + 2] *= 1e-200
        return phi[-1]

    return brentq(endpoint, *bracket, xtol=1e-14, rtol=1e-12)


def trimer_energy(lam: float, alpha: float, basis: ChannelBasis | None = None, n_rho: int = 400,
                  rho_max: float | None = None, h: float = 0.05, diagonal_correction: bool = False) -> dict:
    """Adiabatic trimer energy from the lowest channel.

    Returns a dict with ``E3`` (empty-state -> NaN), the dimer energy ``E2``
    from the 1D solver, the curve and the radial solution.
    """
    rho_grid = default_rho_grid(lam, n_rho, rho_max=rho_max)
    delta, corr = lowest_delta(rho_grid, alpha, lam, basis, diagonal_correction=diagonal_correction)
    curve = delta + corr
    e2 = two_body_ground(lam).ground_energy
    sol = solve_radial(0, rho_grid, curve, h=h, threshold=min(curve[-1], e2))
    e3 = sol.ground_energy if not sol.empty else float("nan")
    return {"E3": e3, "E2": e2, "rho": rho_grid, "delta0": delta, "correction": corr,
            "solution": sol, "rho_max": float(rho_grid[-1]),
            "residual": float(sol.residuals[0]) if not sol.empty else float("nan")}
