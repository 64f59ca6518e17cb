"""Physical inputs of the Rydberg EIT setup and the dimensionless quantities
that every solver works with.

Lengths downstream are measured in blockade radii ``xi`` and energies in
``1/|chi|``; the relative three-body problem is then fixed by the Rydberg
fraction ``alpha`` and the interaction strength ``lam``.
"""
from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path


class ParameterError(ValueError):
    """Invalid physical or dimensionless parameters."""


class FarDetuningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PhysicalParams:
    """Laser and medium parameters.

    ``omega``, ``delta``, ``gamma`` and ``g_coupling`` share one unit (angular
    frequency, or energy with ``hbar=1``).  ``c6`` carries its sign.
    """

    omega: float
    delta: float
    g_coupling: float
    c6: float
    c_light: float = 1.0
    gamma: float = 0.0
    hbar: float = 1.0
    ratio_min: float = 5.0

    @property
    def detuning(self) -> complex:
        return complex(self.delta, -self.gamma)


@dataclass(frozen=True)
class DerivedParams:
    alpha: float
    lam: float
    kappa_xi: float
    sign_regime: int
    chi: complex | float | None = None
    xi: float | None = None
    v_group: float | None = None
    mass: complex | float | None = None
    physical: bool = False

    @property
    def coherent(self) -> bool:
        """True when ``chi`` is real (no intermediate-state decay)."""
        return self.chi is None or isinstance(self.chi, float)

    def require_solver_regime(self):
        """Eigen- and propagation solvers need a real, attractive problem."""
        if not self.coherent:
            raise ParameterError("solvers need gamma = 0; complex chi is for potential evaluation only")
        if self.sign_regime >= 0:
            raise ParameterError("solvers need C6 * Delta < 0 (attractive pair potential)")

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("chi", "mass"):
            if isinstance(d[key], complex):
                d[key] = [d[key].real, d[key].imag]
        return d


def derive(p: PhysicalParams) -> DerivedParams:
    for name in ("omega", "g_coupling", "c6", "c_light"):
        if getattr(p, name) == 0:
            raise ParameterError(f"{name} must be non-zero")
    if p.delta == 0 and p.gamma == 0:
        raise ParameterError("detuning Delta must be non-zero")
    if p.omega < 0:
        raise ParameterError("omega must be positive")
    if p.g_coupling < 0:
        raise ParameterError("g_coupling must be positive")
    if p.gamma < 0:
        raise ParameterError("gamma must be >= 0")

    Delta = p.detuning
    ratio = abs(Delta) / p.omega
    if ratio < p.ratio_min:
        raise ParameterError(
            f"|Delta|/Omega = {ratio:.3g} is below ratio_min = {p.ratio_min}; far-detuned elimination invalid")
    if ratio < 10.0:
        warnings.warn(f"|Delta|/Omega = {ratio:.3g} < 10: far-detuned approximation is marginal",
                      FarDetuningWarning, stacklevel=2)

    g2, w2 = p.g_coupling**2, p.omega**2
    alpha = g2 / (g2 + w2)
    chi = Delta / (2.0 * p.hbar * w2)
    xi = abs(p.c6 * chi) ** (1.0 / 6.0)
    v_group = w2 * p.c_light / (g2 + w2)
    mass = p.hbar * (g2 + w2) ** 3 / (2.0 * p.c_light**2 * g2 * Delta * w2)
    lam = abs(alpha**2 * mass * xi**2 / (p.hbar**2 * chi))
    kappa_xi = xi * g2 / (abs(Delta) * p.c_light)
    if p.gamma == 0:
        chi, mass = chi.real, mass.real
    return DerivedParams(alpha=alpha, lam=lam, kappa_xi=kappa_xi,
                         sign_regime=int(math.copysign(1, p.c6 * p.delta)) if p.delta else 0,
                         chi=chi, xi=xi, v_group=v_group, mass=mass, physical=True)


def lambda_from_optical_depth(kappa_xi: float, alpha: float) -> float:
    """Interaction strength from the optical depth per blockade radius,
    using ``(Omega^2 + g^2)/g^2 = 1/alpha``."""
    return kappa_xi**2 / alpha


def dimensionless_mode(alpha: float, lam: float, sign_regime: int = -1) -> DerivedParams:
    """Specify the problem directly by ``(alpha, lam)``."""
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if not lam > 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    if sign_regime not in (-1, 1):
        raise ParameterError("sign_regime must be -1 or +1")
    return DerivedParams(alpha=alpha, lam=lam, kappa_xi=math.sqrt(alpha * lam),
                         sign_regime=sign_regime)


_PHYSICAL_KEYS = {f for f in PhysicalParams.__dataclass_fields__}


def load_config(path) -> tuple[DerivedParams, dict]:
    """Read an INI-style parameter file.

    Exactly one of the sections ``[physical]`` (keys of :class:`PhysicalParams`)
    or ``[dimensionless]`` (``alpha``, ``lambda``, optional ``sign_regime``)
    must be present.  Any other section is returned verbatim as run options
    with values parsed as floats or ints where possible.
    """
    cp = configparser.ConfigParser()
    with open(Path(path), encoding="utf-8") as fh:
        cp.read_file(fh)
    has_phys, has_dimless = cp.has_section("physical"), cp.has_section("dimensionless")
    if has_phys == has_dimless:
        raise ParameterError("config needs exactly one of [physical] or [dimensionless]")
    if has_phys:
        raw = dict(cp["physical"])
        unknown = set(raw) - _PHYSICAL_KEYS
        if unknown:
            raise ParameterError(f"unknown keys in [physical]: {sorted(unknown)}")
        derived = derive(PhysicalParams(**{k: float(v) for k, v in raw.items()}))
    else:
        raw = dict(cp["dimensionless"])
        unknown = set(raw) - {"alpha", "lambda", "sign_regime"}
        if unknown:
            raise ParameterError(f"unknown keys in [dimensionless]: {sorted(unknown)}")
        try:
            derived = dimensionless_mode(float(raw["alpha"]), float(raw["lambda"]),
                                         int(raw.get("sign_regime", -1)))
        except KeyError as exc:
            raise ParameterError(f"[dimensionless] is missing {exc}") from None
    options = {}
    for section in cp.sections():
        if section in ("physical", "dimensionless"):
            continue
        options[section] = {k: _parse_scalar(v) for k, v in cp[section].items()}
    return derived, options


def _parse_scalar(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if "," in text:
        return [_parse_scalar(t.strip()) for t in text.split(",") if t.strip()]
    return text
