"""Propagation of few-photon relative wavefunctions through the medium.

Inside the medium the relative wavefunction obeys a Schroedinger equation in
the propagation coordinate, so after a distance ``L`` every relative
eigenstate has picked up the phase ``exp(-i E tau)``.  The incoming field is
flat (all correlation functions equal to one) and we apply ``exp(-i H tau)``
with a Strang split-step:

    psi <- exp(-i V dt/2) F^-1 exp(-i k^2 dt) F exp(-i V dt/2) psi

The potential is even in ``eta`` and in ``zeta``, and so is the flat input,
so the default box is the quadrant ``[0, L]^2`` with reflecting walls on a
cell-centred grid.  There the cosine transform (DCT-II) diagonalises the
kinetic term exactly and the flat field is an exact zero-energy state of the
free problem.  A periodic box on ``[-L, L)^2`` with an FFT is available too.

Two-photon runs use the half-line ``eta >= 0`` with the same conventions, so
``g2`` and ``g3`` share a single ``tau``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import LinearOperator, eigsh

from .geometry import pair_distances_from_jacobi, symmetry_orbit
from .potentials import ATTRACTIVE, pair_potential, total_from_jacobi
from .solution import ConvergenceError


class ContaminationWarning(UserWarning):
    """Waves reflected or wrapped at the box edge reach the analysed region."""


def tau_from_medium_length(medium_length: float, lam: float, tau_alpha: float = 1.0) -> float:
    """Propagation parameter after ``medium_length`` blockade radii.

    ``tau = 2 a^2 (L / xi) / kappa_xi`` with ``kappa_xi = sqrt(a lam)``.  Here
    ``a`` is the Rydberg fraction entering the kinematics (group velocity and
    mass).  It is kept separate from the three-body ``alpha`` so that the
    three-body term can be switched off without stopping the light.
    """
    if medium_length < 0:
        raise ValueError("medium length must be non-negative")
    if lam <= 0 or tau_alpha <= 0:
        raise ValueError("lambda and the kinematic Rydberg fraction must be positive")
    return 2.0 * tau_alpha**2 * medium_length / math.sqrt(tau_alpha * lam)


@dataclass(frozen=True)
class Box:
    """Computational box for ``dim`` relative coordinates.

    ``boundary='reflecting'`` covers ``[0, L]^dim`` with cell centres
    ``(i + 1/2) h``; ``'periodic'`` covers ``[-L, L)^dim`` with nodes
    ``-L + i h``.  ``absorber`` is the width of a layer at the outer edges
    where deviations from a reference field are damped at a rate rising
    quadratically to ``absorber_rate`` (0 disables the layer).
    """

    half_width: float
    n_points: int
    dim: int = 2
    boundary: str = "reflecting"
    absorber: float = 0.0
    absorber_rate: float = 0.5

    def __post_init__(self):
        if self.boundary not in ("reflecting", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if self.n_points < 8 or self.half_width <= 0:
            raise ValueError("box needs at least 8 points and positive width")
        if not 0 <= self.absorber < self.half_width / 2:
            raise ValueError("absorber width must be in [0, L/2)")

    @classmethod
    def from_spacing(cls, half_width, spacing, **kw) -> "Box":
        n = int(round(half_width / spacing))
        if kw.get("boundary") == "periodic":
            n *= 2
        return cls(half_width, n, **kw)

    @property
    def spacing(self) -> float:
        if self.boundary == "reflecting":
            return self.half_width / self.n_points
        return 2.0 * self.half_width / self.n_points

    @property
    def axis(self) -> np.ndarray:
        h = self.spacing
        if self.boundary == "reflecting":
            return (np.arange(self.n_points) + 0.5) * h
        return -self.half_width + np.arange(self.n_points) * h

    @property
    def wavenumbers(self) -> np.ndarray:
        if self.boundary == "reflecting":
            return math.pi * np.arange(self.n_points) / self.half_width
        return 2.0 * math.pi * sfft.fftfreq(self.n_points, d=self.spacing)

    def mesh(self):
        x = self.axis
        if self.dim == 1:
            return (x,)
        return tuple(np.meshgrid(x, x, indexing="ij"))

    def k_squared(self) -> np.ndarray:
        k2 = self.wavenumbers**2
        if self.dim == 1:
            return k2
        return k2[:, None] + k2[None, :]

    def forward(self, psi):
        if self.boundary == "reflecting":
            return sfft.dctn(psi, norm="ortho", workers=-1)
        return sfft.fftn(psi, norm="ortho", workers=-1)

    def inverse(self, phi):
        if self.boundary == "reflecting":
            return sfft.idctn(phi, norm="ortho", workers=-1)
        return sfft.ifftn(phi, norm="ortho", workers=-1)

    def damping_rate(self) -> np.ndarray | None:
        """Absorption rate per unit tau, zero away from the outer edges."""
        if self.absorber == 0:
            return None
        d = self.half_width - np.abs(self.axis)
        if self.boundary == "periodic":
            d = np.minimum(d, np.abs(self.axis + self.half_width))
        s1 = self.absorber_rate * np.clip(1.0 - d / self.absorber, 0.0, 1.0) ** 2
        if self.dim == 1:
            return s1
        return s1[:, None] + s1[None, :]

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "n_points": self.n_points, "dim": self.dim,
                "boundary": self.boundary, "absorber": self.absorber,
                "absorber_rate": self.absorber_rate, "spacing": self.spacing}


@dataclass
class WaveField:
    """Complex relative amplitude on a box after propagation parameter ``tau``."""

    values: np.ndarray
    box: Box
    tau: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expected = (self.box.n_points,) * self.box.dim
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} does not match box {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite amplitudes")

    @classmethod
    def flat(cls, box: Box) -> "WaveField":
        """Uncorrelated input: unit amplitude everywhere."""
        return cls(np.ones((box.n_points,) * box.dim, dtype=complex), box)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.box.cell_volume)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def box_potential(box: Box, lam: float, alpha: float = 0.0, sign: int = ATTRACTIVE) -> np.ndarray:
    """``lam * U`` on the box: two-body potential of ``sqrt2 * eta`` in 1D,
    full three-body potential in 2D."""
    if box.dim == 1:
        return lam * pair_potential(math.sqrt(2.0) * box.axis, sign)
    eta, zeta = box.mesh()
    return lam * total_from_jacobi(eta, zeta, alpha, sign)


def hamiltonian_operator(box: Box, potential: np.ndarray) -> LinearOperator:
    """Matrix-free ``H = k^2 + V`` in exactly the discretisation used by
    :func:`evolve`, on real vectors of length ``n_points**dim``."""
    k2 = box.k_squared()
    shape = potential.shape
    vflat = potential.ravel()

    def matvec(v):
        v = np.asarray(v).reshape(shape)
        out = box.inverse(k2 * box.forward(v))
        if box.boundary == "periodic" and not np.iscomplexobj(v):
            out = out.real
        return (out + potential * v).ravel()

    dtype = complex if box.boundary == "periodic" else float
    n = vflat.size
    return LinearOperator((n, n), matvec=matvec, rmatvec=matvec, dtype=dtype)


def box_eigenstates(box: Box, potential: np.ndarray, n_states: int = 3, tol: float = 1e-12, seed: int = 0):
    """Lowest eigenpairs of :func:`hamiltonian_operator` (Lanczos, smallest
    algebraic).  Vectors are returned with the box shape and unit norm."""
    H = hamiltonian_operator(box, potential)
    v0 = np.random.default_rng(seed).standard_normal(H.shape[0])
    E, U = eigsh(H, k=n_states, which="SA", tol=tol, v0=v0)
    order = np.argsort(E)
    E, U = E[order], U[:, order]
    states = U.T.reshape((n_states,) + potential.shape) / math.sqrt(box.cell_volume)
    return E, states


@dataclass
class StepReport:
    n_steps: int
    dt: float
    max_norm_drift: float  # largest relative norm change in one step (no absorber)
    norm_history: np.ndarray


def evolve(initial: WaveField, potential: np.ndarray, tau: float, dt: float = 0.05,
           norm_budget: float = 1e-8, record_every: int = 0, reference=None) -> tuple[WaveField, StepReport]:
    """Apply ``exp(-i H tau)`` by Strang splitting with at most ``dt`` per step.

    Without an absorber every step is unitary; a relative norm change above
    ``norm_budget`` in any step raises :class:`ConvergenceError`.  With an
    absorber, the deviation from ``reference`` is damped after each step;
    ``reference`` is called with the step index and returns the reference
    values on the absorbing points (default: the flat field 1).
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if not np.isrealobj(potential) and np.any(np.imag(potential) != 0):
        raise ValueError("propagation needs a real potential (coherent regime)")
    box = initial.box
    potential = np.real(potential)
    n_steps = int(math.ceil(tau / dt - 1e-12)) if tau > 0 else 0
    step = tau / n_steps if n_steps else 0.0
    half_v = np.exp(-0.5j * step * potential)
    kinetic = np.exp(-1j * step * box.k_squared())
    rate = box.damping_rate()
    psi = initial.values.copy()
    if rate is not None:
        band = np.nonzero(rate.ravel() > 0)[0]
        damp = np.exp(-step * rate.ravel()[band])
    norm0 = np.vdot(psi, psi).real
    prev = norm0
    worst = 0.0
    history = [norm0]
    for i in range(n_steps):
        psi = half_v * box.inverse(kinetic * box.forward(half_v * psi))
        if rate is not None:
            flat = psi.reshape(-1)
            ref = 1.0 if reference is None else reference(i)
            flat[band] = ref + damp * (flat[band] - ref)
        nrm = np.vdot(psi, psi).real
        if not math.isfinite(nrm):
            raise ConvergenceError(f"non-finite field in step {i}")
        if rate is None:
            drift = abs(nrm - prev) / prev
            worst = max(worst, drift)
            if drift > norm_budget:
                raise ConvergenceError(f"norm drift {drift:.3e} in step {i} exceeds budget {norm_budget:.1e}")
        prev = nrm
        if record_every and (i + 1) % record_every == 0:
            history.append(nrm)
    out = WaveField(psi, box, initial.tau + tau, dict(initial.meta))
    return out, StepReport(n_steps, step, worst, np.asarray(history) * box.cell_volume)


class PairStepper:
    """Two-photon field advanced in lockstep with a three-photon run, used as
    the absorber reference ``psi2(r12) psi2(r13) psi2(r23)``.

    The product is the exact asymptotic form when one photon is far from the
    other two, so damping towards it removes outgoing three-body waves while
    leaving the pair ridges untouched.
    """

    def __init__(self, box3: Box, box2: Box, potential2: np.ndarray, dt: float):
        if box3.boundary != "reflecting" or box2.boundary != "reflecting":
            raise ValueError("the cluster reference needs reflecting boxes")
        if not math.isclose(box3.spacing, box2.spacing):
            raise ValueError("pair and three-photon boxes must share the spacing")
        self.box2 = box2
        self.psi = np.ones(box2.n_points, dtype=complex)
        self.half_v = np.exp(-0.5j * dt * potential2)
        self.kinetic = np.exp(-1j * dt * box2.k_squared())
        self.steps = 0
        rate = box3.damping_rate()
        band = np.nonzero(rate.ravel() > 0)[0]
        eta, zeta = (m.ravel()[band] for m in box3.mesh())
        r = [np.abs(v) for v in (eta, 0.5 * eta + 0.5 * math.sqrt(3.0) * zeta,
                                 -0.5 * eta + 0.5 * math.sqrt(3.0) * zeta)]
        if max(v.max() for v in r) > box2.axis[-1]:
            raise ValueError("pair box too small for the absorbing layer")
        self._stencils = [self._stencil(v) for v in r]

    def _stencil(self, x):
        # four-point Lagrange on the cell-centred axis, mirrored at the origin
        h = self.box2.spacing
        u = x / h - 0.5
        i0 = np.floor(u).astype(int) - 1
        t = u - (i0 + 1)
        idx = i0[None, :] + np.arange(4)[:, None]
        idx = np.where(idx < 0, -idx - 1, idx)
        idx = np.minimum(idx, self.box2.n_points - 1)
        w = np.stack([-t * (t - 1) * (t - 2) / 6, (t + 1) * (t - 1) * (t - 2) / 2,
                      -(t + 1) * t * (t - 2) / 2, (t + 1) * t * (t - 1) / 6])
        return idx, w

    def __call__(self, i: int):
        while self.steps <= i:
            self.psi = self.half_v * self.box2.inverse(self.kinetic * self.box2.forward(self.half_v * self.psi))
            self.steps += 1
        out = 1.0
        for idx, w in self._stencils:
            out = out * np.sum(w * self.psi[idx], axis=0)
        return out


def eigenphase_errors(box: Box, potential: np.ndarray, dt: float, tau: float = 10.0, n_states: int = 3,
                      states=None):
    """Phase error of split-step evolution for the lowest box eigenstates.

    Returns ``(errors, energies)`` where ``errors[j] = |arg(<phi_j| U(tau) phi_j>
    exp(i E_j tau))|`` plus the loss of overlap modulus.
    """
    if states is None:
        E, states = box_eigenstates(box, potential, n_states)
    else:
        E, states = states
    errs = []
    for Ej, phi in zip(E, states):
        wf, _ = evolve(WaveField(phi, box), potential, tau, dt)
        ov = np.vdot(phi, wf.values) * box.cell_volume
        errs.append(abs(np.angle(ov * np.exp(1j * Ej * tau))) + abs(1.0 - abs(ov)))
    return np.asarray(errs), np.asarray(E)


def choose_step(lam: float, alpha: float, spacing: float, dt0: float = 0.1, tol: float = 1e-6,
                tau: float = 10.0, n_states: int = 3, probe_points: int = 48, max_halvings: int = 12,
                sign: int = ATTRACTIVE):
    """Largest ``dt0 / 2**j`` whose eigenphase error stays below ``tol``.

    The test runs on a small probe box with the production spacing (the
    splitting error is set by the largest wavenumber and the potential, not
    by the box size).  Returns ``(dt, errors)``.
    """
    probe = Box(probe_points * spacing, probe_points, dim=2)
    V = box_potential(probe, lam, alpha, sign)
    pairs = box_eigenstates(probe, V, n_states)
    dt = dt0
    for _ in range(max_halvings + 1):
        errs, _ = eigenphase_errors(probe, V, dt, tau, states=pairs)
        if errs.max() < tol:
            return dt, errs
        dt *= 0.5
    raise ConvergenceError(f"eigenphase error {errs.max():.2e} still above {tol:.1e} at dt={dt * 2:.2e}")


def cosine_interpolate(values, half_width: float, eta, zeta):
    """Evaluate the cosine series of a field on the reflecting quadrant
    ``[0, L]^2`` (cell-centred samples) at arbitrary points."""
    n = values.shape[0]
    coef = sfft.dctn(np.asarray(values, dtype=float), norm="ortho")
    s = np.full(n, math.sqrt(2.0 / n))
    s[0] = math.sqrt(1.0 / n)
    k = math.pi * np.arange(n) / half_width
    ce = np.cos(np.outer(eta, k)) * s
    cz = np.cos(np.outer(zeta, k)) * s
    return np.einsum("pj,jk,pk->p", ce, coef, cz, optimize=True)


def _mirror_spline(x, g):
    k = 1 if x[0] == 0.0 else 0  # do not duplicate the origin
    xx = np.concatenate([-x[:k - 1:-1] if k else -x[::-1], x])
    gg = np.concatenate([g[:k - 1:-1] if k else g[::-1], g])
    return CubicSpline(xx, gg)


def connected_g3(g3, g2, eta, zeta, g2_axis=None):
    """``2 + g3 - sum_{i<j} g2(r_ij)`` on the points ``(eta, zeta)``.

    ``g2`` is either a callable of the two-body Jacobi coordinate
    ``r / sqrt2`` or samples on ``g2_axis`` (non-negative, increasing),
    extended as an even function and interpolated with a cubic spline.
    """
    eta = np.asarray(eta, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if callable(g2):
        f, limit = g2, np.inf
    else:
        x = np.asarray(g2_axis, dtype=float)
        f, limit = _mirror_spline(x, np.asarray(g2, dtype=float)), x[-1]
    rs = [r / math.sqrt(2.0) for r in pair_distances_from_jacobi(eta, zeta)]
    reach = max(float(np.max(r)) for r in rs)
    if reach > limit * (1 + 1e-12):
        raise ValueError(f"g2 needed at {reach:.3g} but only sampled up to {limit:.3g}")
    return 2.0 + np.asarray(g3, dtype=float) - sum(f(r) for r in rs)


def unfold_quadrant(field_q: np.ndarray, axis: np.ndarray):
    """Mirror a field on the cell-centred quadrant to the full plane."""
    full_axis = np.concatenate([-axis[::-1], axis])
    f = np.concatenate([field_q[::-1], field_q], axis=0)
    f = np.concatenate([f[:, ::-1], f], axis=1)
    return f, full_axis


@dataclass
class CorrelationResult:
    """Correlation functions after a medium of length ``medium_length``.

    ``g2`` lives on ``g2_axis`` (the two-body coordinate ``r / sqrt2``,
    half-line); ``g3`` and ``g3_connected`` on the ``axis x axis`` quadrant
    of the ``(eta, zeta)`` plane.
    """

    g2: np.ndarray
    g2_axis: np.ndarray
    g3: np.ndarray
    g3_connected: np.ndarray
    axis: np.ndarray
    tau: float
    medium_length: float
    alpha: float
    lam: float
    meta: dict = field(default_factory=dict)

    def full_plane(self, which: str = "g3_connected"):
        return unfold_quadrant(getattr(self, which), self.axis)

    def radial_profile(self, which: str = "g3_connected", bin_width: float | None = None):
        """Angle average over rings of width ``bin_width`` (default two cells)."""
        h = self.axis[1] - self.axis[0]
        bw = 2 * h if bin_width is None else bin_width
        eta, zeta = np.meshgrid(self.axis, self.axis, indexing="ij")
        rho = np.hypot(eta, zeta)
        edges = np.arange(0.0, self.axis[-1] + bw, bw)
        idx = np.digitize(rho.ravel(), edges) - 1
        vals = getattr(self, which).ravel()
        total = np.bincount(idx, vals, minlength=len(edges))
        count = np.bincount(idx, minlength=len(edges))
        centres = edges + 0.5 * bw
        ok = count > 0
        return centres[ok], total[ok] / count[ok]

    def peak(self, r_peak: float = 8.0) -> float:
        r, p = self.radial_profile()
        return float(p[r < r_peak].max())

    def fwhm(self, r_peak: float = 8.0) -> float:
        """Full width of the central peak at half its maximum above the zero
        background, from the angle-averaged profile."""
        r, p = self.radial_profile()
        inner = r < r_peak
        i0 = int(np.argmax(np.where(inner, p, -np.inf)))
        half = 0.5 * p[i0]
        below = np.nonzero(p[i0:] < half)[0]
        if half <= 0 or not len(below):
            return float("nan")
        j = i0 + below[0]
        # linear interpolation between the bracketing rings
        r_half = r[j - 1] + (half - p[j - 1]) * (r[j] - r[j - 1]) / (p[j] - p[j - 1])
        return float(2.0 * r_half)

    def tail_ratio(self, r_min: float = 15.0, r_max: float | None = None, r_peak: float = 8.0) -> float:
        """``max |g3_connected|`` for ``r_min < rho < r_max`` over the peak."""
        eta, zeta = np.meshgrid(self.axis, self.axis, indexing="ij")
        rho = np.hypot(eta, zeta)
        r_max = self.meta.get("trusted_radius", self.axis[-1]) if r_max is None else r_max
        sel = (rho > r_min) & (rho < r_max)
        if not sel.any():
            return float("nan")
        return float(np.abs(self.g3_connected[sel]).max() / self.peak(r_peak))

    def symmetry_error(self, which: str = "g3", r_max: float | None = None, n_samples: int = 200,
                       seed: int = 0) -> float:
        """Largest spread of the field over the permutation images of random
        points with ``rho < r_max``, relative to the field's maximum there.

        Off-grid values come from the cosine series of the field, which is
        the exact interpolant for the reflecting quadrant.
        """
        r_max = 0.5 * self.axis[-1] if r_max is None else r_max
        rng = np.random.default_rng(seed)
        rho = r_max * np.sqrt(rng.random(n_samples))
        th = 2 * math.pi * rng.random(n_samples)
        orbit = np.abs(symmetry_orbit(rho * np.sin(th), rho * np.cos(th)))
        h = self.axis[1] - self.axis[0]
        L = self.axis[-1] + 0.5 * h
        vals = cosine_interpolate(getattr(self, which), L, orbit[:, 0].ravel(), orbit[:, 1].ravel())
        vals = vals.reshape(orbit.shape[0], -1)
        scale = np.abs(vals).max()
        return float(np.max(vals.max(axis=0) - vals.min(axis=0)) / scale)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "lambda": self.lam, "tau": self.tau,
                "medium_length": self.medium_length, **self.meta}


def _contamination(run_a, run_b, axis_a, radius):
    """Max difference of two runs (same spacing) on the disk ``rho < radius``."""
    n = int(np.searchsorted(axis_a, radius))
    a = run_a[:n, :n]
    b = run_b[:n, :n]
    eta, zeta = np.meshgrid(axis_a[:n], axis_a[:n], indexing="ij")
    disk = np.hypot(eta, zeta) < radius
    return float(np.abs(a - b)[disk].max()) if disk.any() else 0.0


def correlations_after_medium(alpha: float, lam: float, medium_length: float, box_half_width: float = 80.0,
                              spacing: float = 0.25, dt: float | None = None, tau_alpha: float = 1.0,
                              absorber: float = 20.0, absorber_rate: float = 1.0, pair_box_factor: float = 8.0,
                              verify_box: bool = True, trusted_fraction: float = 0.75,
                              contamination_tol: float = 1e-3, on_contamination: str = "warn",
                              sign: int = ATTRACTIVE) -> CorrelationResult:
    """Flat two- and three-photon input propagated over ``medium_length``.

    The three-photon field lives on the reflecting quadrant ``[0, L]^2``; an
    absorbing layer of width ``absorber`` damps it towards the product of
    pair fields, which are advanced in lockstep on a half-line of length
    ``pair_box_factor * L`` with the same ``tau`` and step.  ``g2`` is taken
    from that same pair run.

    With ``verify_box`` the run is repeated in a box 25% larger and the
    largest change of ``g3_connected`` inside ``min(trusted_fraction * L, L - absorber)`` is
    stored as ``meta['contamination']``; above ``contamination_tol`` times
    the peak it warns or raises according to ``on_contamination``.
    ``dt=None`` halves the step until the eigenphase test passes.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if on_contamination not in ("warn", "error", "ignore"):
        raise ValueError("on_contamination must be warn, error or ignore")
    tau = tau_from_medium_length(medium_length, lam, tau_alpha)
    phase_errors = None
    if dt is None:
        dt, phase_errors = choose_step(lam, alpha, spacing, sign=sign)

    def run(L):
        box3 = Box.from_spacing(L, spacing, dim=2, absorber=absorber if absorber > 0 else 0.0,
                                absorber_rate=absorber_rate)
        box2 = Box.from_spacing(pair_box_factor * L, spacing, dim=1)
        n_steps = int(math.ceil(tau / dt - 1e-12)) if tau > 0 else 0
        step = tau / n_steps if n_steps else dt
        v2 = box_potential(box2, lam, 0.0, sign)
        if absorber > 0:
            pair = PairStepper(box3, box2, v2, step)
            wf3, rep3 = evolve(WaveField.flat(box3), box_potential(box3, lam, alpha, sign), tau, dt,
                               reference=pair)
            pair(n_steps - 1)
            g2 = np.abs(pair.psi) ** 2
            drift2 = 0.0
        else:
            wf2, rep2 = evolve(WaveField.flat(box2), v2, tau, dt)
            wf3, rep3 = evolve(WaveField.flat(box3), box_potential(box3, lam, alpha, sign), tau, dt)
            g2, drift2 = wf2.intensity, rep2.max_norm_drift
        eta, zeta = box3.mesh()
        gc = connected_g3(wf3.intensity, g2, eta, zeta, g2_axis=box2.axis)
        return box3, box2, wf3.intensity, g2, gc, rep3, drift2

    box3, box2, g3, g2, gc, rep3, drift2 = run(box_half_width)
    trusted = min(trusted_fraction * box_half_width, box_half_width - absorber)
    meta = {"dt": rep3.dt, "n_steps": rep3.n_steps, "box": box3.to_dict(), "pair_box": box2.to_dict(),
            "max_norm_drift": max(rep3.max_norm_drift, drift2), "tau_alpha": tau_alpha,
            "trusted_radius": trusted, "sign_regime": sign}
    if phase_errors is not None:
        meta["eigenphase_errors"] = [float(e) for e in phase_errors]
    res = CorrelationResult(g2, box2.axis, g3, gc, box3.axis, tau, medium_length, alpha, lam, meta)

    if verify_box and tau > 0:
        big3, _, _, _, big_gc, _, _ = run(1.25 * box_half_width)
        cont = _contamination(gc, big_gc, box3.axis, trusted)
        meta["contamination"] = cont
        meta["contamination_relative"] = cont / max(res.peak(), 1e-300)
        if cont > contamination_tol * max(res.peak(), 1e-300):
            msg = (f"box edge contaminates the region rho < {trusted:g}: change {cont:.2e} "
                   f"when the box grows by 25%")
            if on_contamination == "error":
                raise ConvergenceError(msg)
            if on_contamination == "warn":
                warnings.warn(msg, ContaminationWarning, stacklevel=2)
    return res
