"""Few-body solvers for three interacting Rydberg slow-light polaritons.

Submodules:

- ``params``      physical inputs to the dimensionless ``alpha``, ``lambda``
- ``potentials``  effective two- and three-body potentials
- ``geometry``    Jacobi and hyperspherical coordinates, grids
- ``eigensolve``  dimer and trimer states on grids
- ``adiabatic``   hyperspherical adiabatic curves and trimer energies
- ``propagate``   propagation through the medium, g2 and g3
- ``reference``   independent oracles
- ``cli``         command-line front end
"""

__version__ = "0.1.0"

from .params import DerivedParams, ParameterError, PhysicalParams, derive, dimensionless_mode, load_config
from .potentials import (connected_three_body, pair_potential, potential_on_jacobi_grid, total_from_jacobi,
                         total_potential)
from .geometry import Grid1D, Grid2D, to_jacobi, from_jacobi, to_hyperspherical, symmetry_orbit
from .solution import BoxTooSmallError, ConvergenceError, EigenSolution
from .eigensolve import central_dip_depth, ratio_scan, three_body_ground, two_body_ground
from .adiabatic import ChannelBasis, adiabatic_curves, lowest_delta, trimer_energy
from .propagate import CorrelationResult, WaveField, correlations_after_medium, evolve, tau_from_medium_length
