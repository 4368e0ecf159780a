"""Command-line front end: ``vnslab verify | simulate | diagnose | decay | convergence``.

Exit codes: 0 success, 1 usage / I-O / validation / horizon errors,
2 verification failure, 3 numerical blow-up.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_BLOWUP = 0, 1, 2, 3


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _window(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise argparse.ArgumentTypeError("window must be lo,hi with lo < hi")
    return vals[0], vals[1]


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _err(msg: str) -> None:
    print(f"vnslab: {msg}", file=sys.stderr)


def _csv_path(out: str | None, default_dir: str, default_name: str) -> str:
    """``--out`` names a CSV file when it ends in .csv, otherwise a directory."""
    if out is None:
        return os.path.join(default_dir, default_name)
    if out.endswith(".csv"):
        parent = os.path.dirname(out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        return out
    os.makedirs(out, exist_ok=True)
    return os.path.join(out, default_name)


# -- verify ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .identities import SUITES, run_suites, write_csv

    names = [args.suite] if args.suite else None
    if args.suite and args.suite not in SUITES:
        _err(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
        return EXIT_USAGE
    seed = 0 if args.seed is None else args.seed
    reports = run_suites(names, seed=seed, n_samples=args.samples, mode=args.mode)
    path = _csv_path(args.out, ".", "verify.csv")
    try:
        write_csv(reports, path)
    except OSError as exc:
        _err(f"cannot write report: {exc}")
        return EXIT_USAGE
    failed = [r for r in reports if r.gating and not r.passed]
    for r in reports:
        status = "PASS" if r.passed else ("FAIL" if r.gating else "info")
        print(f"{status:4}  {r.name:48s} max_rel={r.max_rel:.3e} tol={r.tol:.1e}")
    print(f"{len(reports)} checks, {len(failed)} gating failures; report: {path}")
    return EXIT_FAILED if failed else EXIT_OK


# -- simulate -------------------------------------------------------------------------

def _load(args):
    from .solver.config import load_config

    cfg = load_config(args.config)
    updates = {"workers": args.workers}
    if args.seed is not None:
        updates["seed"] = args.seed
    return cfg.with_updates(**updates).validate()


def cmd_simulate(args) -> int:
    from .solver.driver import simulate

    cfg = _load(args)
    out_dir = args.out if args.out else cfg.output_dir

    def progress(step, total):
        if step % max(1, total // 10) == 0:
            print(f"step {step}/{total}", file=sys.stderr, flush=True)

    res = simulate(cfg, out_dir, rho_list=args.rho or (), progress=progress)
    print(f"snapshots: {res.n_snapshots} in {res.out_dir}")
    print(f"frozen fraction: {res.frozen_fraction:.6f}")
    print(f"wall time: {res.wall_time:.2f} s")
    return EXIT_OK


# -- diagnose -------------------------------------------------------------------------

def _diagnose_grid1d(snaps, rhos, args):
    from .diagnostics.report import NormRow
    from .diagnostics.series1d import (GridSeries1D, chi_integral_1d, energy_f_1d, energy_identity_residual,
                                       l2_1d)

    series = GridSeries1D.from_snapshots(snaps)
    rows = []
    for rho in rhos:
        rows.append(NormRow("chi_f", rho, chi_integral_1d(series, rho)))
        rows.append(NormRow("E0_f", rho, energy_f_1d(series, 0, rho)))
        rows.append(NormRow("E1_f", rho, energy_f_1d(series, 1, rho)))
        rows.append(NormRow("L2_f", rho, l2_1d(series, rho, 0)))
        rows.append(NormRow("L2_Yf", rho, l2_1d(series, rho, 1)))
    for r1, r2 in zip(rhos[:-1], rhos[1:]):
        rows.append(NormRow("energy_identity_residual", r2, energy_identity_residual(series, r1, r2).residual))
    return rows


def _diagnose_particle3d(snaps, rhos, args):
    from .diagnostics.report import NormRow, read_norm_csv
    from .diagnostics.series3d import ParticleSeries3D, crossing_tally, energy_wave_3d, l2_density_3d
    from .solver.driver import CROSSINGS_FILE

    series = ParticleSeries3D.from_snapshots(snaps)
    rows = []
    for rho in rhos:
        for n in (0, 1):
            e = energy_wave_3d(series, n, rho)
            rows.append(NormRow(f"E{n}_phi", rho, e.value, e.covered_fraction, e.tolerance))
        e = l2_density_3d(series, rho)
        rows.append(NormRow("L2_f", rho, e.value, e.covered_fraction, e.tolerance))
    if series.has_particles:
        tally = crossing_tally(series, rhos)
        for k, rho in enumerate(rhos):
            rows.append(NormRow("chi_f", rho, float(tally.chi[k])))
            rows.append(NormRow("E0_f", rho, float(tally.e0[k])))
    else:
        path = os.path.join(args.snapshots, CROSSINGS_FILE)
        if os.path.exists(path):
            wanted = set(rhos)
            rows.extend(r for r in read_norm_csv(path) if r.rho in wanted)
    return rows


def cmd_diagnose(args) -> int:
    from .diagnostics.report import write_norm_csv
    from .solver.snapshot import load_series

    rhos = sorted(args.rho or [])
    if not rhos:
        print("no rho requested; nothing to do")
        return EXIT_OK
    snaps = load_series(args.snapshots)
    if not snaps:
        _err(f"no snapshots in {args.snapshots}")
        return EXIT_USAGE
    mode = snaps[0].mode
    rows = _diagnose_grid1d(snaps, rhos, args) if mode == "grid1d" else _diagnose_particle3d(snaps, rhos, args)
    path = _csv_path(args.out, args.snapshots, "norms.csv")
    write_norm_csv(rows, path)
    for r in rows:
        print(f"{r.quantity:26s} rho={r.rho:<8.4g} value={r.value:.6e} covered={r.covered_fraction:.3f}")
    print(f"report: {path}")
    return EXIT_OK


# -- decay ----------------------------------------------------------------------------

def cmd_decay(args) -> int:
    from .diagnostics.fits import fit_decay

    if args.csv:
        from .diagnostics.report import read_norm_csv

        rows = [r for r in read_norm_csv(args.csv) if r.quantity == args.quantity]
        if not rows:
            _err(f"no rows for quantity {args.quantity!r} in {args.csv}")
            return EXIT_USAGE
        x = np.array([r.rho for r in rows])
        y = np.array([r.value for r in rows])
        fit = fit_decay(x, y, window=args.window, seed=args.seed or 0)
        label = args.quantity
    else:
        from .diagnostics.free_transport import free_transport_decay

        window = args.window or (5.0, 40.0)
        fit, _, _ = free_transport_decay(t_window=window)
        label = "sup_x int f dv (free transport)"
    print(f"{label}: exponent {fit.slope:+.4f} +- {fit.half_width:.4f} ({fit.n_points} points)")
    return EXIT_OK


# -- convergence ----------------------------------------------------------------------

def cmd_convergence(args) -> int:
    from .diagnostics.convergence import convergence_study

    cfg = _load(args)
    table = convergence_study(cfg, args.levels)
    for line in table.lines():
        print(line)
    ok = table.passed()
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAILED


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None, help="random seed (overrides the config)")
    common.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1,
                        help="worker threads (default: logical cores)")
    common.add_argument("--out", default=None, help="output directory, or a .csv path for reports")

    p = argparse.ArgumentParser(prog="vnslab", description="Numerical laboratory for the Vlasov-Nordstrom system.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the identity suites")
    v.add_argument("--suite", default=None, help="run only this suite")
    v.add_argument("--samples", type=_positive_int, default=None, help="points per identity")
    v.add_argument("--mode", choices=("analytic", "fd"), default="analytic",
                   help="closed-form jets or the finite-difference oracle")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="evolve a configuration")
    s.add_argument("config")
    s.add_argument("--rho", type=_float_list, default=None, help="hyperboloids for particle crossing tallies")
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("diagnose", parents=[common], help="norms of a snapshot directory on hyperboloids")
    d.add_argument("snapshots")
    d.add_argument("--rho", type=_float_list, default=None, help="comma-separated rho values")
    d.set_defaults(func=cmd_diagnose)

    k = sub.add_parser("decay", parents=[common], help="fit a power law to a norm series")
    k.add_argument("--csv", default=None, help="norm CSV from diagnose (default: free-transport study)")
    k.add_argument("--quantity", default="E0_f")
    k.add_argument("--window", type=_window, default=None, help="lo,hi range of the fit")
    k.set_defaults(func=cmd_decay)

    c = sub.add_parser("convergence", parents=[common], help="observed orders under refinement")
    c.add_argument("config")
    c.add_argument("--levels", type=int, default=3)
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    from .diagnostics.convergence import ConvergenceError
    from .diagnostics.fits import FitError
    from .diagnostics.series1d import HorizonError
    from .diagnostics.series3d import ResolutionError
    from .solver.common import NumericalBlowup
    from .solver.config import ConfigError
    from .solver.snapshot import SnapshotError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except NumericalBlowup as exc:
        _err(f"numerical blow-up: {exc}")
        return EXIT_BLOWUP
    except (ConfigError, HorizonError, ResolutionError, ConvergenceError, FitError, SnapshotError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(f"I/O error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
