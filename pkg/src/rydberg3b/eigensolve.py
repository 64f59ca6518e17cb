"""Bound states of two and three polaritons on uniform grids.

Two-body: ``H2 = -d^2/deta^2 + lam * U2(sqrt(2) eta)`` with ``eta`` the pair
Jacobi coordinate, so the one- and two-dimensional problems share the same
kinetic normalisation.

Three-body: ``H = -d^2/deta^2 - d^2/dzeta^2 + lam * U(eta, zeta)``, five-point
Laplacian, Dirichlet walls.  The bosonic ground state is even under
``eta -> -eta`` and ``zeta -> -zeta``; by default only the quadrant
``eta, zeta >= 0`` is solved, with mirror ghost nodes on the axes.  The
reduced operator is symmetrised with the half-weights of the axis nodes and
has exactly the even-even eigenvalues of the full grid.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from scipy.linalg import eigh_tridiagonal

from .geometry import SQRT2, Grid1D, Grid2D
from .potentials import pair_potential, total_from_jacobi
from .solution import BoxTooSmallError, ConvergenceError, EigenSolution

log = logging.getLogger(__name__)

MAX_ENLARGE = 4


def delta_limit_energy(lam: float) -> float:
    """Contact-interaction estimate of the dimer energy, used to size boxes."""
    return -(2.0 * math.pi * lam / 3.0) ** 2 / 8.0


def auto_grid_1d(lam: float, spacing: float = 0.05, decay_lengths: float = 18.0) -> Grid1D:
    kappa = math.sqrt(-delta_limit_energy(lam))
    return Grid1D.from_spacing(max(20.0, decay_lengths / kappa), spacing)


def auto_grid_2d(lam: float, leak_tol: float = 1e-6, max_quadrant_points: int = 1_500_000) -> Grid2D:
    """Box and spacing for the three-body solver.

    The slowest decay of a trimer is along the atom-dimer arms,
    ``exp(-k zeta)`` with ``k^2 = E2 - E3``; with ``E3 >= 1.4 E2`` (the smallest
    ratio seen for alpha <= 1) this gives ``k >= 0.63 sqrt(|E2|)``.  The
    half-width is chosen so that ``exp(-k L) = leak_tol`` and is then capped so
    that the parity-reduced problem stays below ``max_quadrant_points``
    unknowns.  Spacing: 0.1 for lam >= 0.5, 0.2 down to lam = 0.1, 0.25 below.
    """
    if lam >= 0.5:
        h = 0.1
    elif lam >= 0.1:
        h = 0.2
    else:
        h = 0.25
    e2 = two_body_ground(lam, leak_tol=np.inf).ground_energy
    k = 0.63 * math.sqrt(-e2)
    half_width = max(20.0, math.log(1.0 / leak_tol) / k)
    half_width = min(half_width, h * math.sqrt(max_quadrant_points))
    return Grid2D.from_spacing(half_width, h)


def _leak_ratio(edge_values, psi_max):
    return float(np.max(np.abs(edge_values)) / psi_max)


def _handle_leak(ratio, leak_tol, on_leak, what):
    msg = f"{what}: boundary amplitude {ratio:.2e} of maximum exceeds {leak_tol:.1e}"
    if on_leak == "warn":
        warnings.warn(msg, stacklevel=3)
        return False
    if on_leak == "enlarge":
        return True
    raise BoxTooSmallError(msg)


# --- two body -----------------------------------------------------------------

def two_body_hamiltonian(lam: float, grid: Grid1D):
    """Tridiagonal ``(diagonal, off_diagonal, interior_axis)`` of ``H2``."""
    x = grid.axis[1:-1]
    h = grid.spacing
    diag = 2.0 / h**2 + lam * pair_potential(SQRT2 * x)
    off = np.full(len(x) - 1, -1.0 / h**2)
    return diag, off, x


def two_body_ground(lam: float, grid: Grid1D | None = None, n_states: int = 1,
                    leak_tol: float = 1e-6, on_leak: str = "error") -> EigenSolution:
    if lam <= 0:
        raise ValueError("lam must be positive")
    grid = grid or auto_grid_1d(lam)
    for attempt in range(MAX_ENLARGE + 1):
        diag, off, x = two_body_hamiltonian(lam, grid)
        E, V = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_states - 1))
        h = grid.spacing
        psi = np.zeros((n_states, grid.n_points))
        psi[:, 1:-1] = V.T / math.sqrt(h)
        Hv = diag[:, None] * V
        Hv[:-1] += off[:, None] * V[1:]
        Hv[1:] += off[:, None] * V[:-1]
        residuals = np.linalg.norm(Hv - V * E, axis=0)
        for s in psi:
            s *= np.sign(s[np.argmax(np.abs(s))])
        ratio = _leak_ratio(psi[0, [1, -2]], np.abs(psi[0]).max())
        if ratio > leak_tol and _handle_leak(ratio, leak_tol, on_leak, "two-body"):
            if attempt == MAX_ENLARGE:
                raise BoxTooSmallError(f"two-body box still leaking after {MAX_ENLARGE} enlargements")
            grid = Grid1D.from_spacing(1.5 * grid.half_width, grid.spacing)
            continue
        break
    floor = (math.pi / (2.0 * grid.half_width)) ** 2
    return EigenSolution(
        energies=E, wavefunctions=psi, residuals=residuals, axes=(grid.axis,),
        grid=grid.to_dict(),
        meta={"lambda": lam, "box_floor": floor, "bound": (E < -floor).tolist(),
              "edge_ratio": ratio, "solver": "tridiagonal"},
    )


# --- three body ---------------------------------------------------------------

def _half_line_operator(m: int, h: float):
    """Symmetrised ``-d^2/dx^2`` on nodes ``0, h, ..., (m-1) h`` for even
    functions, Dirichlet at ``m h``; also returns the node weights."""
    d = np.full(m, 2.0 / h**2)
    o = np.full(m - 1, -1.0 / h**2)
    o[0] = -SQRT2 / h**2
    w = np.ones(m)
    w[0] = 0.5
    return sp.diags([o, d, o], [-1, 0, 1], format="csr"), w


def _full_line_operator(m: int, h: float):
    return sp.diags([np.full(m - 1, -1.0), np.full(m, 2.0), np.full(m - 1, -1.0)],
                    [-1, 0, 1], format="csr") / h**2, np.ones(m)


def three_body_hamiltonian(lam: float, alpha: float, grid: Grid2D, symmetry: str = "even"):
    """Sparse symmetric Hamiltonian and the node axis it acts on.

    Returns ``(H, axis, weights)``; for ``symmetry='even'`` the unknowns are
    ``sqrt(w_i w_j) * psi_ij`` on the quadrant nodes.
    """
    n = grid.n_points
    h = grid.spacing
    if symmetry == "even":
        if n % 2 == 0:
            raise ValueError("even-parity reduction needs an odd number of grid points")
        c = (n - 1) // 2
        axis = grid.eta[c:n - 1]
        T, w = _half_line_operator(len(axis), h)
    elif symmetry == "none":
        axis = grid.eta[1:-1]
        T, w = _full_line_operator(len(axis), h)
    else:
        raise ValueError(f"unknown symmetry {symmetry!r}")
    m = len(axis)
    I = sp.identity(m, format="csr")
    E, Z = np.meshgrid(axis, axis, indexing="ij")
    V = lam * total_from_jacobi(E, Z, alpha)
    H = sp.kron(T, I, format="csr") + sp.kron(I, T, format="csr") + sp.diags(V.ravel(), format="csr")
    return H, axis, w


def count_below(H, sigma: float):
    """Number of eigenvalues of symmetric ``H`` below ``sigma`` (Sylvester
    inertia of an unpivoted LDL^T), together with the factorisation."""
    A = (H - sigma * sp.identity(H.shape[0], format="csc")).tocsc()
    lu = sla.splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                  options={"SymmetricMode": True})
    return int(np.count_nonzero(lu.U.diagonal() < 0)), lu


def lowest_eigenpairs(H, n_states: int, sigma: float, floor: float, tol: float = 1e-12,
                      seed: int = 0):
    """Lowest ``n_states`` eigenpairs by shift-invert Lanczos.

    ``sigma`` is an initial guess for a shift below the spectrum; it is pushed
    down until the inertia count confirms nothing lies beneath it, never past
    the rigorous lower bound ``floor``.
    """
    for _ in range(60):
        below, lu = count_below(H, sigma)
        if below == 0:
            break
        if sigma <= floor:
            raise ConvergenceError("inertia count inconsistent with the lower spectral bound")
        sigma = max(2.0 * sigma if sigma < 0 else sigma - 1.0, floor)
    else:
        raise ConvergenceError("could not place the shift below the spectrum")
    op = sla.LinearOperator(H.shape, matvec=lu.solve, dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(H.shape[0])
    try:
        E, V = sla.eigsh(H, k=n_states, sigma=sigma, OPinv=op, which="LM", v0=v0, tol=tol)
    except sla.ArpackNoConvergence as exc:
        raise ConvergenceError(str(exc)) from exc
    order = np.argsort(E)
    return E[order], V[:, order], sigma


def _unfold(x_quadrant, n):
    """Even-even extension of quadrant node values to the full ``n x n`` grid
    (edge nodes zero)."""
    c = (n - 1) // 2
    full = np.zeros((n, n))
    m = x_quadrant.shape[0]
    full[c:c + m, c:c + m] = x_quadrant
    full[c - m + 1:c + 1, c:c + m] = x_quadrant[::-1]
    full[:, c - m + 1:c + 1] = full[:, c:c + m][:, ::-1]
    return full


def three_body_ground(lam: float, alpha: float, grid: Grid2D | None = None, n_states: int = 1,
                      symmetry: str = "even", tol: float = 1e-12, leak_tol: float = 1e-6,
                      on_leak: str = "error", sigma: float | None = None, seed: int = 0) -> EigenSolution:
    """Lowest three-body eigenstates; the first is the trimer.

    ``symmetry='even'`` solves only the parity-even sector (contains the
    bosonic ground state); ``'none'`` uses the whole grid.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    grid = grid or auto_grid_2d(lam)
    for attempt in range(MAX_ENLARGE + 1):
        H, axis, w = three_body_hamiltonian(lam, alpha, grid, symmetry)
        m = len(axis)
        h = grid.spacing
        min_v = float(H.diagonal().min() - 4.0 / h**2)  # H >= min V
        floor = min_v - 1e-12 * max(1.0, abs(min_v))
        e2 = two_body_ground(lam, Grid1D.from_spacing(grid.half_width, h), leak_tol=np.inf).ground_energy
        guess = (6.0 * e2 if e2 < 0 else floor) if sigma is None else sigma
        E, Y, used_sigma = lowest_eigenpairs(H, n_states, max(guess, floor), floor, tol=tol, seed=seed)
        residuals = np.linalg.norm(H @ Y - Y * E, axis=0)
        if symmetry == "even":
            W = np.sqrt(np.outer(w, w)).ravel()
            psi = np.stack([_unfold((Y[:, i] / W).reshape(m, m), grid.n_points) for i in range(n_states)])
        else:
            psi = np.zeros((n_states, grid.n_points, grid.n_points))
            psi[:, 1:-1, 1:-1] = Y.T.reshape(n_states, m, m)
        norms = np.sqrt((np.abs(psi) ** 2).sum(axis=(1, 2)) * h * h)
        psi /= norms[:, None, None]
        for s in psi:
            s *= np.sign(s.flat[np.argmax(np.abs(s))])
        g = psi[0]
        edge = np.concatenate([g[1, :], g[-2, :], g[:, 1], g[:, -2]])
        ratio = _leak_ratio(edge, np.abs(g).max())
        if ratio > leak_tol and _handle_leak(ratio, leak_tol, on_leak, "three-body"):
            if attempt == MAX_ENLARGE:
                raise BoxTooSmallError(f"three-body box still leaking after {MAX_ENLARGE} enlargements")
            grid = Grid2D.from_spacing(1.5 * grid.half_width, h)
            continue
        break
    box_floor = 2.0 * (math.pi / (2.0 * grid.half_width)) ** 2
    threshold = min(e2, 0.0)  # atom-dimer continuum on the same box
    return EigenSolution(
        energies=E, wavefunctions=psi, residuals=residuals, axes=(grid.eta, grid.zeta),
        grid=grid.to_dict(),
        meta={"lambda": lam, "alpha": alpha, "symmetry": symmetry, "sigma": used_sigma,
              "box_floor": box_floor, "threshold": threshold, "e2": e2,
              "bound": (E < threshold - box_floor).tolist(), "edge_ratio": ratio,
              "solver": "shift-invert Lanczos", "outside_low_energy_regime": lam > 1.0},
    )


def central_dip_depth(sol: EigenSolution) -> float:
    """``1 - n(0)/max n`` for the ground-state density; positive when the
    origin is a local minimum of the density."""
    dens = np.abs(sol.ground_state) ** 2
    n = dens.shape[0]
    c = (n - 1) // 2
    centre = dens[c, c]
    neighbours = dens[[c - 1, c + 1, c, c], [c, c, c - 1, c + 1]]
    if centre >= neighbours.min():
        return 0.0
    return float(1.0 - centre / dens.max())


# --- scans --------------------------------------------------------------------

@dataclass
class ScanResult:
    lambdas: np.ndarray
    alphas: np.ndarray
    e2: np.ndarray  # per lambda
    e3: np.ndarray  # [alpha, lambda]
    method: str
    meta: list = field(default_factory=list)

    @property
    def ratio(self) -> np.ndarray:
        return self.e3 / self.e2[None, :]

    def rows(self):
        for i, a in enumerate(self.alphas):
            for j, lam in enumerate(self.lambdas):
                yield {"lambda": lam, "alpha": a, "E2": self.e2[j], "E3": self.e3[i, j],
                       "ratio": self.e3[i, j] / self.e2[j],
                       "residual": self.meta[i * len(self.lambdas) + j].get("residual", np.nan)}


def _scan_point(method, lam, alpha, leak_tol):
    try:
        if method == "grid":
            grid = auto_grid_2d(lam)
            e2 = two_body_ground(lam, Grid1D.from_spacing(max(grid.half_width, auto_grid_1d(lam).half_width),
                                                          grid.spacing)).ground_energy
            sol = three_body_ground(lam, alpha, grid, leak_tol=leak_tol, on_leak="warn")
            return e2, sol.ground_energy, {"residual": float(sol.residuals[0]), "grid": sol.grid,
                                           "edge_ratio": sol.meta["edge_ratio"]}
        from .adiabatic import trimer_energy
        res = trimer_energy(lam, alpha)
        return res["E2"], res["E3"], {"residual": float(res["residual"]), "rho_max": res["rho_max"]}
    except Exception as exc:  # recorded, scan continues
        log.warning("scan point lam=%g alpha=%g failed: %s", lam, alpha, exc)
        return np.nan, np.nan, {"error": repr(exc)}


def ratio_scan(lambdas, alphas, method: str = "grid", leak_tol: float = 1e-3,
               workers: int = 1) -> ScanResult:
    """Trimer/dimer energies on a ``(alpha, lambda)`` grid.

    ``method`` is ``'grid'`` (2D finite differences) or ``'adiabatic'``.
    Failed points are recorded as NaN with the error in ``meta``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if lambdas.size == 0 or alphas.size == 0:
        raise ValueError("empty scan")
    if method not in ("grid", "adiabatic"):
        raise ValueError(f"unknown method {method!r}")
    tasks = [(method, lam, a, leak_tol) for a in alphas for lam in lambdas]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_scan_point, *zip(*tasks)))
    else:
        results = [_scan_point(*t) for t in tasks]
    e2 = np.full(len(lambdas), np.nan)
    e3 = np.full((len(alphas), len(lambdas)), np.nan)
    meta = []
    for idx, (a2, a3, info) in enumerate(results):
        i, j = divmod(idx, len(lambdas))
        if np.isfinite(a2):
            e2[j] = a2
        e3[i, j] = a3
        meta.append({"lambda": float(lambdas[j]), "alpha": float(alphas[i]), **info})
    return ScanResult(lambdas=lambdas, alphas=alphas, e2=e2, e3=e3, method=method, meta=meta)
