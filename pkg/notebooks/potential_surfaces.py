"""
Potential surfaces in the relative plane
========================================

Pair sum, connected three-body term and total potential on the (eta, zeta)
plane for a few Rydberg fractions.  The ridges along multiples of 60 degrees
are the three pair channels; at alpha = 1 the total vanishes at the origin.
"""
import sys
from pathlib import Path

import numpy as np

from rydberg3b import Grid2D, potential_on_jacobi_grid
from rydberg3b.export import svg_heatmap, write_field_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "notebooks/out") / "potential"
out.mkdir(parents=True, exist_ok=True)

# %% a 4 x 4 window resolves the saturated core and the ridges
grid = Grid2D.from_spacing(4.0, 0.05)
c = (grid.n_points - 1) // 2

for alpha in (0.0, 0.5, 1.0):
    f = potential_on_jacobi_grid(grid, alpha)
    print(f"alpha={alpha:g}: u_total(0,0)={f.u_total[c, c]:+.6f}  min={f.u_total.min():+.6f}  "
          f"max u3={f.u3.max():.6f}")
    write_field_csv(out / f"alpha{alpha:g}.csv", f.eta, f.zeta,
                    {"u2_sum": f.u2_sum, "u3": f.u3, "u_total": f.u_total})
    svg_heatmap(out / f"u_total_alpha{alpha:g}.svg", f.eta, f.zeta, f.u_total, title=f"total, alpha={alpha:g}")

# %% the connected part alone, which only matters where all three photons overlap
f = potential_on_jacobi_grid(grid, 1.0)
svg_heatmap(out / "u3_alpha1.svg", f.eta, f.zeta, f.u3, title="connected three-body term, alpha=1")

# %% along the ridge eta = 0 photons 1 and 2 coincide; once the third leaves,
# only their saturated pair term -1 is left
ridge = f.u_total[c, :]
print("ridge, zeta = 0, 1, 2, 4:", np.round(ridge[[c, c + 20, c + 40, -1]], 6))
