"""Batch front end: solve, dprofile, rates, vsc-check.

Exit codes: 0 success, 1 configuration error, 2 solver failure,
3 rate-inequality or source-condition failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .experiments import log_grid, make_noise, records_to_csv, run_sweep
from .plots import plot_profile, plot_rates
from .rates import (BenchmarkRegimeError, DistanceProfile, ProfileRangeError,
                    IndexFunction, build_profile, choose_alpha,
                    check_vsc, rate_function_from_profile)
from .regularization import (CertificationError, InconsistentDataError,
                             omega_min_solution, solve_tikhonov)
from .solvers import SolverError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VIOLATION = 3

_SOLVER_ERRORS = (SolverError, CertificationError, InconsistentDataError)


def _say(args, *parts):
    if not args.quiet:
        print(*parts)


def _outdir(args, cfg: RunConfig) -> Path:
    out = Path(args.out or cfg.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _profile_for(args, cfg: RunConfig, out: Path, force: bool = False) -> DistanceProfile:
    """Build the distance profile, or reuse the CSV cached in the output
    directory (cmdDProfile always rebuilds)."""
    cache = out / "dprofile.csv"
    if cache.exists() and not force:
        _say(args, f"loading cached profile {cache}")
        return DistanceProfile.read_csv(cache)
    exact = omega_min_solution(cfg.problem)
    grid = cfg.profile_grid
    _say(args, f"building profile on [{grid.r_min:g}, {grid.r_max:g}] "
               f"at {grid.points_per_decade}/decade")
    profile = build_profile(cfg.problem, exact, grid.r_min, grid.r_max,
                            grid.points_per_decade, tol=cfg.solver.profile_tol,
                            max_iter=cfg.solver.max_iter)
    profile.to_csv(cache)
    return profile


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args, cfg)
    problem = cfg.problem
    if args.delta < 0:
        raise ConfigError(f"--delta must be nonnegative, got {args.delta}")
    y_noisy = make_noise(problem, args.delta, args.mode, args.seed)
    if args.alpha is not None:
        alpha = args.alpha
        if alpha <= 0:
            raise ConfigError(f"--alpha must be positive, got {alpha}")
    elif args.delta > 0:
        sweep = cfg.sweep
        c1 = sweep.c1 if sweep else 1.0
        c2 = sweep.c2 if sweep else 1.0
        profile = _profile_for(args, cfg, out)
        alpha = choose_alpha(args.delta, problem.p,
                             rate_function_from_profile(profile), c1, c2)
    else:
        alpha = 1e-6  # near-exact data: a small fixed parameter
    sol = solve_tikhonov(problem, y_noisy, alpha, tol=cfg.solver.tikhonov_tol,
                         max_iter=cfg.solver.max_iter)
    objective = problem.tikhonov_value(sol.x, y_noisy, alpha)
    _say(args, f"alpha            {alpha:.6g}")
    _say(args, f"delta (realized) {sol.delta:.6g}")
    _say(args, f"x                {np.array2string(sol.x, precision=8)}")
    _say(args, f"residual norm    {sol.residual_norm:.8g}")
    _say(args, f"eta dual norm    {problem.y_space.dual_norm(sol.eta):.8g}")
    _say(args, f"objective        {objective:.12g}")
    _say(args, f"certificate      {sol.optimality_gap:.3e}")
    with open(out / "solve.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta", "alpha", "seed", "mode", "objective",
                         "residual", "eta_dual_norm", "certificate"])
        writer.writerow([f"{args.delta:.17g}", f"{alpha:.17g}", str(args.seed),
                         args.mode, f"{objective:.17g}", f"{sol.residual_norm:.17g}",
                         f"{problem.y_space.dual_norm(sol.eta):.17g}",
                         f"{sol.optimality_gap:.17g}"])
    _say(args, f"wrote {out / 'solve.csv'}")
    return EXIT_OK


def cmd_dprofile(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args, cfg)
    profile = _profile_for(args, cfg, out, force=True)
    plot_profile(profile, out / "dprofile.svg")
    n_zero = int(np.sum(profile.d_values == 0.0))
    _say(args, f"{profile.r_grid.size} nodes, D(rMin)={profile.d_values[0]:.8g}, "
               f"{n_zero} nodes in the benchmark tail (D = 0)")
    _say(args, f"wrote {out / 'dprofile.csv'} and {out / 'dprofile.svg'}")
    return EXIT_OK


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    if cfg.sweep is None:
        raise ConfigError("configuration has no sweep section; rates needs one")
    out = _outdir(args, cfg)
    profile = _profile_for(args, cfg, out)
    exact = omega_min_solution(cfg.problem)
    sweep = cfg.sweep
    deltas = log_grid(sweep.delta_min, sweep.delta_max, sweep.points_per_decade)
    lo, hi = profile.phi_window()
    kept = [d for d in deltas if lo <= d <= hi]
    if not kept:
        raise ProfileRangeError(
            f"delta grid [{sweep.delta_min:g}, {sweep.delta_max:g}] lies outside "
            f"the covered Phi range [{lo:g}, {hi:g}]: extend rGrid")
    if len(kept) < len(deltas) and not args.quiet:
        print(f"warning: clipped {len(deltas) - len(kept)} delta(s) outside the "
              f"covered Phi range [{lo:g}, {hi:g}]", file=sys.stderr)
    records, diagnostics = run_sweep(
        cfg.problem, exact, profile, kept, c1=sweep.c1, c2=sweep.c2,
        modes=sweep.modes, seeds=sweep.seeds,
        distance_tol=cfg.solver.inner_tol, tikhonov_tol=cfg.solver.tikhonov_tol,
        max_iter=cfg.solver.max_iter)
    if diagnostics:
        for diag in diagnostics:
            print(f"solver failure at delta={diag.delta:g} mode={diag.mode} "
                  f"seed={diag.seed}: {diag.message}", file=sys.stderr)
        return EXIT_SOLVER
    records_to_csv(records, out / "rates.csv")
    plot_rates(records, out / "rates.svg")
    bad = [r for r in records if not r.all_ok]
    _say(args, f"{len(records)} records, {len(records) - len(bad)} with all four "
               f"inequalities satisfied")
    _say(args, f"wrote {out / 'rates.csv'} and {out / 'rates.svg'}")
    if bad:
        for r in bad:
            print(f"violation at delta={r.delta:g} mode={r.mode} seed={r.seed}: "
                  f"lower={r.ok_lower} eta={r.ok_eta} doeta={r.ok_doeta} "
                  f"upper={r.ok_upper}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _parse_phi_spec(spec: str, args, cfg: RunConfig, out: Path):
    """fromProfile | power:<kappa>[:<scale>] | log:<a>[:<scale>] | table:<csv>"""
    if spec == "fromProfile":
        profile = _profile_for(args, cfg, out)
        return rate_function_from_profile(profile), profile
    kind, _, rest = spec.partition(":")
    if kind == "power":
        parts = rest.split(":")
        kappa = float(parts[0])
        scale = float(parts[1]) if len(parts) > 1 else 1.0
        return IndexFunction.from_power(kappa, scale), None
    if kind == "log":
        parts = rest.split(":")
        a = float(parts[0])
        scale = float(parts[1]) if len(parts) > 1 else 1.0
        return IndexFunction.from_log(a, scale), None
    if kind == "table":
        ts, vals = [], []
        with open(rest, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["t", "phi"]:
                raise ValueError(f"phi table must have header t,phi, got {header!r}")
            for row in reader:
                ts.append(float(row[0]))
                vals.append(float(row[1]))
        return IndexFunction.from_table(np.array(ts), np.array(vals)), None
    raise ValueError(f"unknown phi spec {spec!r}")


def cmd_vsc_check(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args, cfg)
    try:
        phi, profile = _parse_phi_spec(args.phi, args, cfg, out)
    except _SOLVER_ERRORS:
        raise
    except (ValueError, OSError, IndexError) as err:
        raise ConfigError(f"invalid phi spec {args.phi!r}: {err}") from None
    exact = omega_min_solution(cfg.problem)
    report = check_vsc(cfg.problem, exact, phi, tol=args.tol, profile=profile)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict}: minimum gap {report.minimum_gap:.6e} over "
          f"{report.evaluations} probes (tolerance {args.tol:g})")
    print(f"witness: {np.array2string(report.witness, precision=8)}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bregrates",
        description="Tikhonov regularization with two-sided Bregman-distance "
                    "rate verification")
    parser.add_argument("--config", required=True, help="experiment configuration (JSON)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="noise seed for solve")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="one Tikhonov solve with certificate")
    p_solve.add_argument("--delta", type=float, default=0.0, help="noise level")
    p_solve.add_argument("--alpha", type=float, default=None,
                         help="regularization parameter (default: a priori choice)")
    p_solve.add_argument("--mode", default="randomUnit",
                         choices=["randomUnit", "topSingular"])
    p_solve.set_defaults(func=cmd_solve)

    p_prof = sub.add_parser("dprofile", help="sample the distance function")
    p_prof.set_defaults(func=cmd_dprofile)

    p_rates = sub.add_parser("rates", help="delta sweep with the rate sandwich")
    p_rates.set_defaults(func=cmd_rates)

    p_vsc = sub.add_parser("vsc-check", help="adversarial source-condition check")
    p_vsc.add_argument("--phi", default="fromProfile",
                       help="fromProfile | power:k[:scale] | log:a[:scale] | table:file.csv")
    p_vsc.add_argument("--tol", type=float, default=1e-6)
    p_vsc.set_defaults(func=cmd_vsc_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ProfileRangeError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _SOLVER_ERRORS as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, BenchmarkRegimeError) as err:
        # profile/table invariant violations surface as solver-grade defects
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
