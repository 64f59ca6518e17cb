"""Command-line front end.

Every subcommand writes CSV data, a ``manifest.json`` describing the run
(parameters, artifacts with digests, convergence summaries) and a separate
``timing.json``; the manifest and CSV files are identical on reruns.

Exit codes: 0 success, 1 invalid input, 2 solver did not converge.

Examples::

    rydberg3b potential --alpha 1 --out out/pot --svg
    rydberg3b adiabatic --alpha 0 0.5 1 --lambda 0.1 --out out/curves
    rydberg3b bound --alpha 1 --lambda 1 --out out/bound
    rydberg3b scan --alpha 0 0.1 1 --lambda 0.02 0.05 0.1 0.3 1 --method adiabatic --out out/scan
    rydberg3b correlate --alpha 1 --lambda 0.1 --medium-length 20 --out out/g3 --svg
    rydberg3b oracle-report --out out/oracles
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .export import RunManifest, svg_curves, svg_heatmap, write_csv, write_field_csv, write_json
from .geometry import Grid2D, symmetry_orbit
from .params import ParameterError, load_config
from .potentials import potential_on_jacobi_grid, total_from_jacobi
from .solution import BoxTooSmallError, ConvergenceError

log = logging.getLogger("rydberg3b")

EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2


class _Settings:
    """Flags merged over config-file values (flags win)."""

    def __init__(self, args):
        self.args = args
        self.options = {}
        self.alphas = None
        self.lambdas = None
        self.sign = -1
        if args.config:
            derived, self.options = load_config(args.config)
            self.alphas = [derived.alpha]
            self.lambdas = [derived.lam]
            self.sign = derived.sign_regime
        if getattr(args, "alpha", None) is not None:
            self.alphas = list(args.alpha)
        if getattr(args, "lam", None) is not None:
            self.lambdas = list(args.lam)

    def option(self, section, key, flag=None, default=None):
        if flag is not None:
            return flag
        return self.options.get(section, {}).get(key, default)

    def alpha(self, default=None):
        vals = self.alphas if self.alphas is not None else ([default] if default is not None else None)
        if vals is None:
            raise ParameterError("alpha is required (--alpha or a config file)")
        for a in vals:
            if not 0.0 <= a <= 1.0:
                raise ParameterError(f"alpha must lie in [0, 1], got {a}")
        return vals

    def lam(self, default=None):
        vals = self.lambdas if self.lambdas is not None else ([default] if default is not None else None)
        if vals is None:
            raise ParameterError("lambda is required (--lambda or a config file)")
        for v in vals:
            if not v > 0:
                raise ParameterError(f"lambda must be positive, got {v}")
        return vals


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grid(settings, lam=None):
    n = settings.option("grid", "n", settings.args.grid_n)
    L = settings.option("grid", "half_width", settings.args.box_l)
    if n is None and L is None:
        return None
    if n is None or L is None:
        raise ParameterError("--grid-n and --box-l must be given together")
    n = int(n)
    if n % 2 == 0:
        n += 1
    return Grid2D(float(L), n)


# --- subcommands ----------------------------------------------------------

def cmd_potential(args, settings, out, man):
    grid = _grid(settings) or Grid2D.from_spacing(4.0, 0.05)
    alphas = settings.alpha()
    man.parameters.update({"alpha": alphas, "grid": grid.to_dict(), "sign_regime": settings.sign})
    for a in alphas:
        f = potential_on_jacobi_grid(grid, a, settings.sign)
        tag = f"alpha{a:g}"
        man.add(write_field_csv(out / f"potential_{tag}.csv", f.eta, f.zeta,
                                {"u2_sum": f.u2_sum, "u3": f.u3, "u_total": f.u_total}))
        c = (grid.n_points - 1) // 2
        summary = {"u_total_origin": float(f.u_total[c, c]), "u3_origin": float(f.u3[c, c]),
                   "u2_sum_origin": float(f.u2_sum[c, c]), "u_total_min": float(f.u_total.min()),
                   "u3_max_abs": float(np.abs(f.u3).max())}
        if args.audit:
            eta, zeta = grid.mesh()
            orbit = symmetry_orbit(eta, zeta)
            vals = np.stack([total_from_jacobi(o[0], o[1], a, settings.sign) for o in orbit])
            summary["max_orbit_asymmetry"] = float(np.max(vals.max(axis=0) - vals.min(axis=0)))
        man.results[tag] = summary
        if args.svg:
            man.add(svg_heatmap(out / f"potential_{tag}.svg", f.eta, f.zeta, f.u_total,
                                title=f"total potential, alpha={a:g}"))
    return EXIT_OK


def cmd_adiabatic(args, settings, out, man):
    from .adiabatic import ChannelBasis, adiabatic_curves
    from .eigensolve import two_body_ground

    alphas = settings.alpha()
    lam = settings.lam(0.1)[0]
    kmax = int(settings.option("adiabatic", "kmax", args.kmax, 24))
    rho_max = float(settings.option("adiabatic", "rho_max", args.rho_max, 60.0))
    n_rho = int(settings.option("adiabatic", "n_rho", args.n_rho, 240))
    rho = np.geomspace(0.05, rho_max, n_rho)
    basis = ChannelBasis(k_max=kmax, sector=args.sector)
    e2 = two_body_ground(lam).ground_energy
    man.parameters.update({"alpha": alphas, "lambda": lam, "kmax": kmax, "sector": args.sector,
                           "rho": {"min": 0.05, "max": rho_max, "n": n_rho, "spacing": "geometric"},
                           "sign_regime": settings.sign})
    man.results["E2"] = e2
    for a in alphas:
        cs = adiabatic_curves(basis, rho, a, lam)
        tag = f"alpha{a:g}"
        cols = {"rho": rho}
        for (k, p), lc in zip(cs.labels, cs.lambda_curves):
            cols[f"Lambda_{p}{k}"] = lc
        for (k, p), dc in zip(cs.labels, cs.delta_curves):
            cols[f"Delta_{p}{k}"] = dc
        cols["E2"] = np.full_like(rho, e2)
        man.add(write_csv(out / f"curves_{tag}.csv", cols))
        d0 = cs.curve(0, "c")
        attractive = [f"{p}{k}" for (k, p), lc in zip(cs.labels, cs.lambda_curves) if np.nanmin(lc) < 0]
        man.results[tag] = {"delta0_at_rho_min": float(d0[0]), "delta0_at_rho_max": float(d0[-1]),
                            "threshold_gap": float(abs(d0[-1] - e2) / abs(e2)),
                            "attractive_channels": attractive}
        if args.svg:
            show = {f"k={k}{'' if p == 'c' else ' (odd)'}": lc for (k, p), lc in
                    zip(cs.labels, cs.lambda_curves) if k <= 24}
            show["E2"] = np.full_like(rho, e2)
            man.add(svg_curves(out / f"curves_{tag}.svg", np.log10(rho), show,
                               title=f"adiabatic curves, alpha={a:g}, lambda={lam:g}",
                               xlabel="log10 rho", ylabel="Lambda", ylim=(4 * min(e2, d0.min()), 0.05)))
    return EXIT_OK


def cmd_bound(args, settings, out, man):
    from .adiabatic import trimer_energy
    from .eigensolve import central_dip_depth, three_body_ground, two_body_ground

    alphas = settings.alpha()
    lams = settings.lam()
    grid = _grid(settings)
    leak = float(settings.option("bound", "leak_tol", args.leak_tol, 1e-6))
    man.parameters.update({"alpha": alphas, "lambda": lams, "method": args.method, "leak_tol": leak,
                           "grid": grid.to_dict() if grid else "auto", "n_states": args.n_states})
    rows = {"lambda": [], "alpha": [], "E2": [], "E3_grid": [], "E3_adiabatic": [], "ratio_grid": [],
            "ratio_adiabatic": [], "central_dip": []}
    for lam in lams:
        for a in alphas:
            e3g = e3a = dip = np.nan
            e2 = two_body_ground(lam).ground_energy
            tag = f"alpha{a:g}_lambda{lam:g}"
            if args.method in ("grid", "both"):
                sol = three_body_ground(lam, a, grid, n_states=args.n_states, leak_tol=leak,
                                        on_leak=args.on_leak)
                e2 = sol.meta.get("e2", e2)
                e3g = sol.ground_energy
                dip = central_dip_depth(sol)
                ax = sol.axes[0]
                man.add(write_field_csv(out / f"wavefunction_{tag}.csv", ax, ax,
                                        {"psi": sol.ground_state.real}))
                man.convergence[tag] = {"residuals": sol.residuals, "energies": sol.energies,
                                        "edge_ratio": sol.meta.get("edge_ratio"),
                                        "outside_low_energy_regime": lam > 1.0}
                if args.svg:
                    man.add(svg_heatmap(out / f"wavefunction_{tag}.svg", ax, ax, sol.ground_state.real,
                                        title=f"ground state, alpha={a:g}, lambda={lam:g}"))
            if args.method in ("adiabatic", "both"):
                res = trimer_energy(lam, a)
                e3a = res["E3"]
                man.convergence.setdefault(tag, {})["adiabatic_residual"] = res["residual"]
            for k, v in (("lambda", lam), ("alpha", a), ("E2", e2), ("E3_grid", e3g), ("E3_adiabatic", e3a),
                         ("ratio_grid", e3g / e2), ("ratio_adiabatic", e3a / e2), ("central_dip", dip)):
                rows[k].append(v)
    man.add(write_csv(out / "energies.csv", rows))
    man.results["energies"] = [dict(zip(rows, vals)) for vals in zip(*rows.values())]
    return EXIT_OK


def cmd_scan(args, settings, out, man):
    from .eigensolve import ratio_scan

    alphas = settings.alpha()
    lams = settings.lam()
    leak = float(settings.option("bound", "leak_tol", args.leak_tol, 1e-3))
    man.parameters.update({"alpha": alphas, "lambda": lams, "method": args.method, "leak_tol": leak,
                           "threads": args.threads})
    res = ratio_scan(lams, alphas, method=args.method, leak_tol=leak, workers=args.threads)
    rows = list(res.rows())
    cols = {k: [r[k] for r in rows] for k in ("lambda", "alpha", "E2", "E3", "ratio", "residual")}
    man.add(write_csv(out / "ratio_table.csv", cols))
    failed = [m for m in res.meta if "error" in m]
    man.convergence["failed_points"] = failed
    man.results["ratio"] = {f"alpha{a:g}": list(res.ratio[i]) for i, a in enumerate(res.alphas)}
    if args.svg:
        man.add(svg_curves(out / "ratio.svg", np.log10(res.lambdas),
                           {f"alpha={a:g}": res.ratio[i] for i, a in enumerate(res.alphas)},
                           title="E3/E2", xlabel="log10 lambda", ylabel="E3/E2", ylim=(0.0, 4.5)))
    return EXIT_NONCONVERGED if failed else EXIT_OK


def cmd_correlate(args, settings, out, man):
    from .propagate import correlations_after_medium, unfold_quadrant

    alphas = settings.alpha()
    lam = settings.lam(0.1)[0]
    R = float(settings.option("propagate", "medium_length", args.medium_length, 20.0))
    L = float(settings.option("propagate", "box_half_width", args.box_l, 80.0))
    n = settings.option("propagate", "n_points", args.grid_n)
    spacing = L / int(n) if n is not None else 0.25
    dt = settings.option("propagate", "dt", args.dt)
    man.parameters.update({"alpha": alphas, "lambda": lam, "medium_length": R, "box_half_width": L,
                           "spacing": spacing, "dt": dt if dt is not None else "auto",
                           "absorber": min(20.0, 0.25 * L),
                           "sign_regime": settings.sign})
    for a in alphas:
        res = correlations_after_medium(a, lam, R, box_half_width=L, spacing=spacing,
                                        dt=None if dt is None else float(dt), sign=settings.sign,
                                        absorber=min(20.0, 0.25 * L),
                                        verify_box=not args.no_verify, on_contamination="warn")
        tag = f"alpha{a:g}"
        man.add(write_csv(out / f"g2_{tag}.csv", {"r": np.sqrt(2.0) * res.g2_axis, "g2": res.g2}))
        man.add(write_field_csv(out / f"g3_{tag}.csv", res.axis, res.axis,
                                {"g3": res.g3, "g3_connected": res.g3_connected}))
        man.results[tag] = {"tau": res.tau, "peak": res.peak() if R > 0 else 0.0,
                            "fwhm": res.fwhm() if R > 0 else float("nan"),
                            "tail_ratio_beyond_15": res.tail_ratio() if R > 0 else float("nan"),
                            "g3_max_dev_from_1": float(np.abs(res.g3 - 1).max())}
        man.convergence[tag] = {k: res.meta[k] for k in ("dt", "n_steps", "max_norm_drift", "contamination",
                                                         "eigenphase_errors") if k in res.meta}
        if args.svg:
            full, ax = unfold_quadrant(res.g3_connected, res.axis)
            keep = np.abs(ax) <= 15.0
            man.add(svg_heatmap(out / f"g3_connected_{tag}.svg", ax[keep], ax[keep], full[np.ix_(keep, keep)],
                                title=f"connected g3, alpha={a:g}, lambda={lam:g}, L={R:g}"))
    if len(alphas) > 1 and R > 0:
        w = {a: man.results[f"alpha{a:g}"]["fwhm"] for a in alphas}
        man.results["fwhm_increases_with_alpha"] = bool(all(
            w[x] < w[y] for x, y in zip(sorted(w), sorted(w)[1:])))
    return EXIT_OK


def cmd_oracle_report(args, settings, out, man):
    from . import reference as ref
    from .eigensolve import two_body_ground
    from .geometry import Grid1D

    lam = settings.lam(0.05)[0]
    reports = [ref.mcguire_ratio(), ref.pair_integral()]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reports.append(ref.delta_limit_two_body(lam))
    for a in (0.0, 0.1, 0.5, 1.0):
        for k, v in ref.saturation_constants(a).items():
            reports.append(ref.OracleReport(f"saturation_{k}(alpha={a:g})", v, "analytic"))
    H, _ = ref.dense_two_body_hamiltonian(1.0, 20.0, 801)
    e_dense = ref.dense_diagonalize(H)[0][0]
    e_sparse = two_body_ground(1.0, Grid1D(20.0, 801)).ground_energy
    reports.append(ref.OracleReport("E2(lambda=1) dense", float(e_dense), "dense-grid", tolerance=1e-8,
                                    note=f"sparse solver {e_sparse!r}, difference {abs(e_dense - e_sparse):.2e}"))
    man.parameters.update({"lambda": lam})
    cols = {k: [getattr(r, k) for r in reports] for k in ("quantity", "value", "method", "tolerance", "note")}
    cols["tolerance"] = ["" if t is None else t for t in cols["tolerance"]]
    man.add(write_csv(out / "oracles.csv", cols))
    man.results["oracles"] = [r.to_dict() for r in reports]
    for r in reports:
        print(f"{r.quantity:40s} {r.value:.12g}  [{r.method}] {r.note}")
    return EXIT_OK


COMMANDS = {"potential": cmd_potential, "adiabatic": cmd_adiabatic, "bound": cmd_bound, "scan": cmd_scan,
            "correlate": cmd_correlate, "oracle-report": cmd_oracle_report}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [physical] or [dimensionless] parameters")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--alpha", type=float, nargs="+", help="Rydberg fraction(s) in [0, 1]")
    common.add_argument("--lambda", dest="lam", type=float, nargs="+", help="interaction strength(s)")
    common.add_argument("--grid-n", type=int, help="points per axis")
    common.add_argument("--box-l", type=float, help="box half width in blockade radii")
    common.add_argument("--kmax", type=int, help="angular momentum cutoff")
    common.add_argument("--threads", type=int, default=1, help="worker processes for scans")
    common.add_argument("--svg", action="store_true", help="also write SVG figures")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="rydberg3b", description="Three Rydberg polaritons: potentials, "
                                 "bound states and photon correlations.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", parents=[common], help="two- and three-body potential maps")
    p.add_argument("--audit", action="store_true", help="check permutation symmetry of the map")

    p = sub.add_parser("adiabatic", parents=[common], help="adiabatic curves against rho")
    p.add_argument("--sector", choices=("bosonic", "all"), default="bosonic")
    p.add_argument("--rho-max", type=float)
    p.add_argument("--n-rho", type=int)

    for name, helptext in (("bound", "dimer and trimer energies"), ("scan", "E3/E2 table over alpha, lambda")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--method", choices=("grid", "adiabatic", "both") if name == "bound" else
                       ("grid", "adiabatic"), default="grid" if name == "scan" else "both")
        p.add_argument("--leak-tol", type=float)
        if name == "bound":
            p.add_argument("--n-states", type=int, default=1)
            p.add_argument("--on-leak", choices=("error", "warn", "enlarge"), default="enlarge")

    p = sub.add_parser("correlate", parents=[common], help="g2, g3 and connected g3 after the medium")
    p.add_argument("--medium-length", type=float, help="medium length in blockade radii")
    p.add_argument("--dt", type=float, help="split-step size (default: eigenphase test)")
    p.add_argument("--no-verify", action="store_true", help="skip the enlarged-box check")

    sub.add_parser("oracle-report", parents=[common], help="analytic and brute-force reference values")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        settings = _Settings(args)
        out = _out_dir(args)
        man = RunManifest(command=args.command, parameters={}, version=__version__)
        code = COMMANDS[args.command](args, settings, out, man)
    except (ParameterError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, BoxTooSmallError, np.linalg.LinAlgError) as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    man.wall_time = time.perf_counter() - t0
    payload = man.deterministic(out)
    write_json(out / "manifest.json", payload)
    write_json(out / "timing.json", {"wall_time_s": man.wall_time})
    log.info("wrote %d artifacts to %s", len(man.artifacts), out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
