"""
Adiabatic curves
================

Hyperangular eigenvalues Lambda_k(rho) for the bosonic channels, and the
effective potential Delta_0 of the lowest channel, at lambda = 0.1.  The
lowest curve approaches the dimer energy at large rho; the slow approach at
this weak coupling comes from tunnelling between neighbouring ridges.
"""
import sys
from pathlib import Path

import numpy as np

from rydberg3b import ChannelBasis, adiabatic_curves, lowest_delta, two_body_ground
from rydberg3b.export import svg_curves, write_csv

out = Path(sys.argv[1] if len(sys.argv) > 1 else "notebooks/out") / "adiabatic"
out.mkdir(parents=True, exist_ok=True)

lam = 0.1
e2 = two_body_ground(lam).ground_energy
rho = np.geomspace(0.05, 60.0, 160)

# %% curves for alpha = 1 with the bosonic selection rule (k multiple of 6)
basis = ChannelBasis(k_max=24)
cs = adiabatic_curves(basis, rho, 1.0, lam)
cols = {"rho": rho, **{f"Lambda_{p}{k}": lc for (k, p), lc in zip(cs.labels, cs.lambda_curves)}}
write_csv(out / "curves_alpha1.csv", cols)
svg_curves(out / "curves_alpha1.svg", np.log10(rho),
           {f"k={k}": lc for (k, _), lc in zip(cs.labels, cs.lambda_curves)} | {"E2": np.full_like(rho, e2)},
           xlabel="log10 rho", ylabel="Lambda", ylim=(4 * e2, 0.05))

# %% Delta_0 for three Rydberg fractions; the short-range value is -3 (1 - alpha) lambda
d0 = {}
for alpha in (0.0, 0.5, 1.0):
    d0[alpha], corr = lowest_delta(rho, alpha, lam, diagonal_correction=True)
    print(f"alpha={alpha:g}: Delta_0(0.05)={d0[alpha][0]:+.5f} (expect {-3 * (1 - alpha) * lam:+.5f}), "
          f"Delta_0(60)/E2={d0[alpha][-1] / e2:.4f}, with diagonal correction "
          f"{(d0[alpha][-1] + corr[-1]) / e2:.4f}")
write_csv(out / "delta0.csv", {"rho": rho, **{f"alpha{a:g}": v for a, v in d0.items()}, "E2": np.full_like(rho, e2)})
svg_curves(out / "delta0.svg", np.log10(rho), {f"alpha={a:g}": v for a, v in d0.items()} | {"E2": np.full_like(rho, e2)},
           xlabel="log10 rho", ylabel="Delta_0")
