"""
Connected three-photon correlation after the medium
===================================================

A flat three-photon input is propagated over 20 blockade radii at
lambda = 0.1 and the connected correlation 2 + g3 - sum g2 is mapped on the
relative plane.  With the three-body term (alpha = 1) the central peak is
lower and about twice as wide.  Pass a smaller box half width as the second
argument for a quick look (default 80; a full run takes several minutes per
alpha on one core).
"""
import sys
from pathlib import Path

import numpy as np

from rydberg3b.export import svg_heatmap, write_field_csv
from rydberg3b.propagate import correlations_after_medium, unfold_quadrant

out = Path(sys.argv[1] if len(sys.argv) > 1 else "notebooks/out") / "correlation"
out.mkdir(parents=True, exist_ok=True)
L = float(sys.argv[2]) if len(sys.argv) > 2 else 80.0

for alpha in (0.0, 1.0):
    res = correlations_after_medium(alpha, 0.1, 20.0, box_half_width=L, absorber=min(20.0, L / 4),
                                    verify_box=False)
    print(f"alpha={alpha:g}: tau={res.tau:.2f}, peak={res.peak():.3f}, FWHM={res.fwhm():.3f}, "
          f"max |g3c| beyond 15 / peak = {res.tail_ratio():.3f}, dt={res.meta['dt']:.4g}")
    write_field_csv(out / f"g3_alpha{alpha:g}.csv", res.axis, res.axis,
                    {"g3": res.g3, "g3_connected": res.g3_connected})
    full, ax = unfold_quadrant(res.g3_connected, res.axis)
    keep = np.abs(ax) <= 15.0
    svg_heatmap(out / f"g3_connected_alpha{alpha:g}.svg", ax[keep], ax[keep], full[np.ix_(keep, keep)],
                title=f"connected g3, alpha={alpha:g}")

# %% the tails along the ridges fall off slowly: they are the Fresnel pattern
# of the abruptly switched-on interaction, not a box artefact
r, p = res.radial_profile()
for rr in (0, 5, 10, 15, 20, 30):
    i = int(np.argmin(abs(r - rr)))
    print(f"rho={r[i]:5.1f}  angle-averaged g3c={p[i]:+.4f}")
