from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class BoxTooSmallError(RuntimeError):
    """Bound-state amplitude reaches the edge of the computational box."""


class ConvergenceError(RuntimeError):
    pass


@dataclass
class EigenSolution:
    """Lowest eigenpairs of a discretised Hamiltonian.

    ``wavefunctions`` has the eigenvector index first and is normalised so that
    the sum of ``|psi|**2`` times the cell volume is one.  ``axes`` holds the
    coordinate arrays of the grid the wavefunctions live on.
    """

    energies: np.ndarray
    wavefunctions: np.ndarray
    residuals: np.ndarray
    axes: tuple
    grid: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.wavefunctions[0]

    @property
    def empty(self) -> bool:
        return len(self.energies) == 0
