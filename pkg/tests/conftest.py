import time

import pytest

import bregrates as br


@pytest.fixture(scope="session")
def shipped():
    """Bundled problems with their penalty-minimal solutions."""
    out = {}
    for name in br.problems.ALL_PROBLEMS:
        cfg = br.problems.load(name)
        exact = br.omega_min_solution(cfg.problem)
        out[name] = (cfg, cfg.problem, exact)
    return out


@pytest.fixture(scope="session")
def shipped_profiles(shipped):
    """Distance profiles at the configured grids, with per-problem build time."""
    out = {}
    for name, (cfg, problem, exact) in shipped.items():
        grid = cfg.profile_grid
        t0 = time.perf_counter()
        profile = br.build_profile(problem, exact, grid.r_min, grid.r_max,
                                   grid.points_per_decade,
                                   tol=cfg.solver.profile_tol)
        out[name] = (profile, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def shipped_sweeps(shipped, shipped_profiles):
    """Full-rate sweeps for every problem with a sweep section."""
    out = {}
    for name in br.problems.SWEEP_PROBLEMS:
        cfg, problem, exact = shipped[name]
        profile, _ = shipped_profiles[name]
        sweep = cfg.sweep
        deltas = br.log_grid(sweep.delta_min, sweep.delta_max, sweep.points_per_decade)
        t0 = time.perf_counter()
        records, diagnostics = br.run_sweep(
            problem, exact, profile, deltas, c1=sweep.c1, c2=sweep.c2,
            modes=sweep.modes, seeds=sweep.seeds,
            distance_tol=cfg.solver.inner_tol,
            tikhonov_tol=cfg.solver.tikhonov_tol)
        elapsed = time.perf_counter() - t0
        assert not diagnostics, f"{name}: solver failures {diagnostics}"
        out[name] = (records, elapsed)
    return out
