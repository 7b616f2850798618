"""Command-line entry point.

Every subcommand writes a JSON envelope {command, config, results,
tolerances, timing, version} to stdout or ``--json``.  Keys are sorted and
wall times live only in the ``timing`` block, so identical configurations
give identical ``results``.  Relative output paths are resolved against
``--outdir``, then the MINANNULI_OUTDIR environment variable, then the
current directory.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 numerics failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, NumericsError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICS = 0, 1, 2, 3
OUTDIR_ENV = "MINANNULI_OUTDIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _outdir(args) -> Path:
    base = args.outdir or os.environ.get(OUTDIR_ENV) or "."
    return Path(base)


def _resolve(args, path) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_absolute():
        p = _outdir(args) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _curve(value):
    """A curve from a list of {k, a, b} terms, a number, or {"samples": [...], "n": N}."""
    from .curves import BoundaryCurve

    if isinstance(value, (int, float)):
        return BoundaryCurve.constant(float(value))
    if isinstance(value, list):
        return BoundaryCurve.from_terms(value)
    if isinstance(value, dict) and "samples" in value:
        samples = value["samples"]
        if "n" in value and int(value["n"]) != len(samples):
            raise DomainError(f"sample count {len(samples)} does not match n={value['n']}")
        return BoundaryCurve.from_samples(samples, tol=float(value.get("tol", 0.0)))
    raise DomainError("curve must be a term list, a number or a samples record")


def _pair(path):
    from .curves import CurvePair

    data = _load_json(path)
    if not isinstance(data, dict) or "top" not in data or "bottom" not in data:
        raise DomainError("pair file needs 'top' and 'bottom' entries")
    return CurvePair(_curve(data["top"]), _curve(data["bottom"]))


def _fan_out(fn, jobs: dict, workers: int) -> dict:
    """Run fn(**job) per key, in a process pool when workers > 1; merge by sorted key."""
    keys = sorted(jobs)
    if workers <= 1 or len(keys) < 2:
        return {k: fn(**jobs[k]) for k in keys}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {k: pool.submit(fn, **jobs[k]) for k in keys}
        return {k: futures[k].result() for k in keys}


# subcommands; each returns (results, tolerances, written files)

def cmd_catenoid(args):
    from . import catenoid as cat
    from .meshio import catenoid_mesh, write_csv, write_mesh

    if (args.kappa is None) == (args.h is None):
        raise UsageError("catenoid: give exactly one of --kappa, --h")
    params = cat.catenoid_params(kappa=args.kappa, h=args.h)
    prof = cat.profile(params.kappa, args.n_nodes)
    res = prof.first_integral_residual()
    results = {"kappa": params.kappa, "h": params.h, "neck_radius": prof.r_min,
               "neck_radius_closed_form": cat.neck_radius(params.kappa),
               "normal_trace": cat.graph_normal_trace(params.kappa),
               "vertical_flux": 2 * math.pi / params.kappa, "n_nodes": prof.n_nodes,
               "first_integral_residual": float(np.max(np.abs(res)))}
    files = {}
    if args.out:
        files["profile"] = write_csv(_resolve(args, args.out), ["t", "r"], zip(prof.t, prof.r))
    if args.export:
        v, f = catenoid_mesh(params.kappa, args.n_nodes, args.n_theta)
        files["mesh"] = write_mesh(_resolve(args, args.export), v, f, args.mesh_format)
    tols = {"kappa_h_inversion": 1e-12, "profile_quadrature": 1e-13,
            "first_integral_residual": "O(dt^2) centered differences"}
    return results, tols, files


def _jacobi_job(kappa, n_max, tol, levels, base_nodes, with_prefactor):
    from . import jacobi
    from .catenoid import profile

    reports: list = []
    dim = jacobi.kernel_dimension(kappa, n_max, tol, levels, base_nodes, with_prefactor, reports=reports)
    return {"kernel_dimension": dim, "modes": [r.to_dict() for r in reports],
            "known_field_residuals": jacobi.known_field_residuals(profile(kappa, (base_nodes - 1) * 4 + 1))}


def cmd_jacobi(args):
    jobs = {f"{k:.12g}": dict(kappa=k, n_max=args.n_max, tol=args.tol, levels=args.levels,
                              base_nodes=args.base_nodes, with_prefactor=args.with_prefactor)
            for k in args.kappa}
    results = _fan_out(_jacobi_job, jobs, args.workers)
    return {"by_kappa": results}, {"kernel_tol": args.tol, "ratio_window": [3.0, 5.0], "stalled_ratio": 2.0}, {}


def cmd_graph(args):
    from .graphsolver import NewtonOptions, PolarGrid, ring_fluxes, solve_minimal_graph
    from .meshio import graph_mesh, write_csv, write_mesh

    if args.curve is not None:
        gamma = _curve(_load_json(args.curve))
    else:
        gamma = _curve(args.const)
    inner = None
    if args.r_inner > 0:
        if args.inner_curve is None:
            raise UsageError("graph: an annular grid needs --inner-curve")
        inner = _curve(_load_json(args.inner_curve))
    grid = PolarGrid(args.n_r, args.n_theta, args.r_inner)
    sol = solve_minimal_graph(gamma, grid, NewtonOptions(tol=args.tol), inner=inner)
    results = sol.summary()
    fl = ring_fluxes(sol)
    results["conservative_flux_outer"] = float(fl[-1])
    results["conservative_flux_spread"] = float(fl.max() - fl.min())
    files = {}
    if args.out:
        files["solution"] = write_csv(_resolve(args, args.out), ["r", "theta", "u"], sol.rows())
    if args.export:
        v, f = graph_mesh(sol)
        files["mesh"] = write_mesh(_resolve(args, args.export), v, f, args.mesh_format)
    return results, {"newton_residual": args.tol, "normal_trace": "O(dr^2) one-sided stencil"}, files


def cmd_annulus(args):
    from .annulus import AnnulusOptions, build_chart, newton_solve
    from .curves import BoundaryCurve, CurvePair
    from .flux import conservation_residuals
    from .meshio import annulus_mesh, write_csv, write_mesh

    if args.pair:
        pair = _pair(args.pair)
        top_mean, bot_mean = pair.top.mean(), pair.bottom.mean()
        h = args.h if args.h is not None else 0.5 * (top_mean - bot_mean)
    else:
        if args.h is None:
            raise UsageError("annulus: give --pair or --h")
        h = args.h
        pert = BoundaryCurve({args.mode: (args.eps, 0.0)}) if args.eps else BoundaryCurve()
        pair = CurvePair(BoundaryCurve.constant(h) + pert, BoundaryCurve.constant(-h) + pert)
    chart = build_chart(h=h, n_t=args.n_t, n_theta=args.n_theta)
    sym = args.symmetry if args.symmetry and args.symmetry > 1 else None
    sol = newton_solve(chart, pair, symmetry=sym, opts=AnnulusOptions(tol=args.tol, allow_lstsq=args.lstsq))
    results = sol.summary()
    results["pair"] = pair.to_dict()
    results["conservation_residuals"] = conservation_residuals(sol.top, sol.bottom)
    results["boundary_error"] = float(max(np.max(np.abs(sol.top.u - pair.top(chart.theta))),
                                          np.max(np.abs(sol.bottom.u - pair.bottom(chart.theta)))))
    files = {}
    if args.out:
        th = chart.theta
        rows = zip(th, sol.top.u, sol.top.u_r, sol.bottom.u, sol.bottom.u_r)
        files["traces"] = write_csv(_resolve(args, args.out), ["theta", "u_top", "u_r_top", "u_bottom",
                                                                "u_r_bottom"], rows)
    if args.export:
        v, f = annulus_mesh(sol)
        files["mesh"] = write_mesh(_resolve(args, args.export), v, f, args.mesh_format)
    return results, {"newton_residual": args.tol, "traces": "O(dt^2) three-row fit"}, files


def _traces_from_file(path):
    from .flux import EndTrace

    data = _load_json(path)
    try:
        return (EndTrace.from_samples("top", data["top"]["u"], data["top"]["u_r"], data["top"].get("u_theta")),
                EndTrace.from_samples("bottom", data["bottom"]["u"], data["bottom"]["u_r"],
                                      data["bottom"].get("u_theta")))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"trace file needs top/bottom records with u and u_r: {exc}") from exc


def cmd_flux(args):
    from .catenoid import half_height_from_kappa
    from .flux import (catenoid_traces, conservation_residuals, finite_radius_vertical_flux, flux_report,
                       orientation_check)

    if args.traces:
        top, bottom = _traces_from_file(args.traces)
    elif args.kappa is not None:
        top, bottom = catenoid_traces(args.kappa, half_height_from_kappa(args.kappa), args.n_theta)
    else:
        raise UsageError("flux: give --kappa or --traces")
    results = {"top": flux_report(top, args.n_a).to_dict(), "bottom": flux_report(bottom, args.n_a).to_dict(),
               "conservation_residuals": conservation_residuals(top, bottom, args.n_a),
               "orientation": orientation_check(top, bottom, n_a=args.n_a)}
    if args.kappa is not None and not args.traces:
        radii = np.linspace(0.8, 1.0, 5)
        results["finite_radius"] = {"radii": radii, "vertical_flux": finite_radius_vertical_flux(args.kappa, radii)}
        results["expected_vertical"] = 2 * math.pi / args.kappa
    return results, {"quadrature": "trapezoid on the periodic grid (spectral)"}, {}


def cmd_center(args):
    from .flux import EndTrace, center, dilated_catenoid_bottom_trace

    if args.trace:
        data = _load_json(args.trace)
        try:
            bottom = EndTrace.from_samples("bottom", data["u"], data["u_r"], data.get("u_theta"))
            v_r = data.get("v_r", 0.0)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"trace file needs u and u_r: {exc}") from exc
    elif args.kappa is not None:
        z0 = complex(*args.z0)
        bottom = dilated_catenoid_bottom_trace(args.kappa, z0, args.n_theta)
        v_r = 0.0
    else:
        raise UsageError("center: give --kappa or --trace")
    rep = center(bottom, v_r)
    results = rep.to_dict()
    if not args.trace:
        results["expected_center"] = list(args.z0)
        results["center_error"] = abs(rep.center.z - complex(*args.z0))
    return results, {"quadrature": "trapezoid on the periodic grid (spectral)"}, {}


def _tallrect_job(d, n, scan, tol, theta):
    from . import tallrect

    p = tallrect.TallRectParams(d, n or 1)
    out = {"d": d, "theta0": p.theta0, "height": tallrect.height(p, tol).value,
           "height_error": tallrect.height(p, tol).error, "min_exponent": tallrect.min_exponent(d, tol=tol)}
    if n:
        out["slope_at_zero"] = tallrect.slope_at_zero(p, tol)
        if theta is not None:
            v = tallrect.ratio_f(theta, p, tol)
            out["f"] = {"theta": theta, "value": v.value, "error": v.error}
    if scan:
        out["witness"] = tallrect.verify_not_minimizing(d, tol).to_dict()
    return out


def cmd_tallrect(args):
    from . import tallrect
    from .meshio import write_mesh

    jobs = {f"{d:.12g}": dict(d=d, n=args.n, scan=args.scan, tol=args.tol, theta=args.theta) for d in args.d}
    results = _fan_out(_tallrect_job, jobs, args.workers)
    files = {}
    if args.export:
        if len(args.d) != 1:
            raise UsageError("tallrect: --export needs a single --d")
        v, f = tallrect.mesh(tallrect.TallRectParams(args.d[0], args.n or 1))
        files["mesh"] = write_mesh(_resolve(args, args.export), v, f, args.mesh_format)
    return {"by_d": results}, {"quadrature": args.tol, "witness": "f - 1 > propagated error bound"}, files


def cmd_gate(args):
    from .obstruction import classify

    pair = _pair(args.pair)
    rep = classify(pair, args.n, args.tol, args.m_max)
    results = rep.to_dict()
    results["pair"] = pair.to_dict()
    return results, {"monotonicity": args.tol, "winding_margin": 1e-8}, {}


def cmd_verify_all(args):
    from .acceptance import format_table, run_all

    select = set(args.only) if args.only else None
    res = run_all(select)
    print(format_table(res), file=sys.stderr)
    results = {str(r.number): {k: v for k, v in r.to_dict().items() if k != "runtime"} for r in res}
    timing = {str(r.number): r.runtime for r in res}
    failed = [r.number for r in res if not r.passed]
    return results, {str(r.number): r.tolerances for r in res}, {}, timing, failed


COMMANDS = {
    "catenoid": cmd_catenoid,
    "jacobi": cmd_jacobi,
    "graph": cmd_graph,
    "annulus": cmd_annulus,
    "flux": cmd_flux,
    "center": cmd_center,
    "tallrect": cmd_tallrect,
    "gate": cmd_gate,
    "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minannuli", description="Minimal annuli and minimal graphs in H^2 x R.")
    p.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    common.add_argument("--json", help="write the JSON envelope here instead of stdout")
    common.add_argument("--outdir", help=f"directory for relative output paths (default ${OUTDIR_ENV} or .)")
    common.add_argument("--mesh-format", choices=["obj", "ply"], default=None,
                        help="mesh format (default from the file suffix, else obj)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("catenoid", parents=[common], help="catenoid profile, neck, flux; CSV and mesh export")
    c.add_argument("--kappa", type=float)
    c.add_argument("--h", type=float, help="half-height in (0, pi/2)")
    c.add_argument("--n-nodes", type=int, default=513, help="t-grid nodes (odd keeps the neck t=0)")
    c.add_argument("--n-theta", type=int, default=64)
    c.add_argument("--out", help="CSV profile (t, r)")
    c.add_argument("--export", help="surface mesh file")

    j = sub.add_parser("jacobi", parents=[common], help="Jacobi mode spectra and kernel dimension")
    j.add_argument("--kappa", type=float, nargs="+", default=[1.0])
    j.add_argument("--n-max", type=int, default=4)
    j.add_argument("--tol", type=float, default=1e-3)
    j.add_argument("--levels", type=int, default=3)
    j.add_argument("--base-nodes", type=int, default=129)
    j.add_argument("--with-prefactor", action="store_true")
    j.add_argument("--workers", type=int, default=1)

    g = sub.add_parser("graph", parents=[common], help="minimal graph over the disk or an annulus")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--curve", help="JSON curve: term list or samples record")
    src.add_argument("--const", type=float, default=0.0)
    g.add_argument("--n-r", type=int, default=32)
    g.add_argument("--n-theta", type=int, default=32)
    g.add_argument("--r-inner", type=float, default=0.0)
    g.add_argument("--inner-curve", help="JSON curve on the inner ring")
    g.add_argument("--tol", type=float, default=1e-10)
    g.add_argument("--out", help="CSV (r, theta, u)")
    g.add_argument("--export", help="surface mesh file")

    a = sub.add_parser("annulus", parents=[common], help="minimal annulus near a catenoid")
    a.add_argument("--pair", help="JSON pair {top, bottom}")
    a.add_argument("--h", type=float, help="catenoid half-height of the chart")
    a.add_argument("--eps", type=float, default=0.0, help="amplitude of eps cos(mode theta) on both curves")
    a.add_argument("--mode", type=int, default=2)
    a.add_argument("--symmetry", type=int, default=None, help="solve in R_m-invariant functions")
    a.add_argument("--n-t", type=int, default=97)
    a.add_argument("--n-theta", type=int, default=96)
    a.add_argument("--tol", type=float, default=1e-10)
    a.add_argument("--lstsq", action="store_true", help="least-squares steps at a near-singular linearization")
    a.add_argument("--out", help="CSV end traces")
    a.add_argument("--export", help="surface mesh file")

    f = sub.add_parser("flux", parents=[common], help="end fluxes and conservation residuals")
    f.add_argument("--kappa", type=float, help="use exact catenoid traces")
    f.add_argument("--traces", help="JSON {top: {u, u_r}, bottom: {u, u_r}}")
    f.add_argument("--n-theta", type=int, default=64)
    f.add_argument("--n-a", type=int, default=64, help="directions for the dilational flux")

    ce = sub.add_parser("center", parents=[common], help="center of an annulus from its bottom trace")
    ce.add_argument("--kappa", type=float, help="use the catenoid with axis through --z0")
    ce.add_argument("--z0", type=float, nargs=2, default=[0.0, 0.0], metavar=("X", "Y"))
    ce.add_argument("--trace", help="JSON {u, u_r, v_r}")
    ce.add_argument("--n-theta", type=int, default=128)

    t = sub.add_parser("tallrect", parents=[common], help="tall rectangles are not area-minimizing")
    t.add_argument("--d", type=float, nargs="+", required=True)
    t.add_argument("--n", type=int, default=None, help="exponent in r = tan^n(theta/2)")
    t.add_argument("--theta", type=float, default=None, help="evaluate f at this theta (needs --n)")
    t.add_argument("--scan", action="store_true", help="search for a certified witness")
    t.add_argument("--tol", type=float, default=1e-13)
    t.add_argument("--workers", type=int, default=1)
    t.add_argument("--export", help="surface mesh file")

    ga = sub.add_parser("gate", parents=[common], help="obstruction gates on a boundary pair")
    ga.add_argument("--pair", required=True, help="JSON pair {top, bottom}")
    ga.add_argument("--n", type=int, default=None, help="theta samples (default from the degree)")
    ga.add_argument("--tol", type=float, default=1e-10)
    ga.add_argument("--m-max", type=int, default=12)

    v = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    v.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    return p


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "outdir")}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    t0 = time.perf_counter()
    failed: list = []
    try:
        out = COMMANDS[args.command](args)
        if args.command == "verify-all":
            results, tols, files, timing, failed = out
        else:
            results, tols, files = out
            timing = {}
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericsError as exc:
        print(f"numerics failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    timing["total"] = time.perf_counter() - t0
    envelope = {"command": args.command, "config": _config(args), "results": results, "tolerances": tols,
                "files": {k: str(v) for k, v in sorted(files.items())}, "timing": timing,
                "version": __version__}
    text = dumps(envelope)
    if args.json:
        _resolve(args, args.json).write_text(text + "\n")
    else:
        print(text)
    return EXIT_NUMERICS if failed else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
