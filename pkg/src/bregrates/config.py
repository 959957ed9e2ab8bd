"""Strict JSON experiment configurations.

One file describes one experiment: the problem instance, the r-grid for
the distance profile, the delta sweep, and solver overrides. Unknown keys
are rejected at every level so a typo cannot silently change a run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .experiments import NOISE_MODES
from .penalties import make_penalty
from .regularization import ProblemSpec
from .spaces import NormSpec


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


@dataclass(frozen=True)
class ProfileGridSpec:
    r_min: float
    r_max: float
    points_per_decade: int


@dataclass(frozen=True)
class SweepSpec:
    delta_min: float = 1e-4
    delta_max: float = 1e-1
    points_per_decade: int = 5
    seeds: tuple = (0, 1, 2)
    modes: tuple = NOISE_MODES
    c1: float = 1.0
    c2: float = 1.0


@dataclass(frozen=True)
class SolverSettings:
    tikhonov_tol: float = 1e-10
    inner_tol: float = 1e-8
    profile_tol: float = 1e-9
    max_iter: int = 200_000


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSpec
    profile_grid: ProfileGridSpec
    sweep: SweepSpec | None
    solver: SolverSettings
    output: str | None = None


def _require_keys(obj: dict, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in {where}")


def _positive(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if not np.isfinite(v) or v <= 0:
        raise ConfigError(f"{name} must be positive and finite, got {value!r}")
    return v


def _parse_problem(obj: dict) -> ProblemSpec:
    _require_keys(obj, {"A", "y_exact", "p", "q", "y_weights", "penalty"},
                  {"A", "y_exact", "p", "q", "penalty"}, "problem")
    try:
        A = np.array(obj["A"], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("problem.A must be a row-major array of number arrays") from None
    if A.ndim != 2:
        raise ConfigError("problem.A must be a 2-d matrix")
    y = np.array(obj["y_exact"], dtype=float)
    if y.ndim != 1 or y.size != A.shape[0]:
        raise ConfigError("problem.y_exact must be a vector matching the rows of A")
    p = _positive(obj["p"], "problem.p")
    if p <= 1.0:
        raise ConfigError(f"problem.p must exceed 1, got {p}")
    q = _positive(obj["q"], "problem.q")
    if q <= 1.0:
        raise ConfigError(f"problem.q must exceed 1, got {q}")
    weights = obj.get("y_weights")
    if weights is None:
        weights = np.ones(A.shape[0])
    else:
        weights = np.array(weights, dtype=float)
        if weights.shape != (A.shape[0],) or not np.all(weights > 0):
            raise ConfigError("problem.y_weights must be positive, one per row of A")
    pen_obj = obj["penalty"]
    _require_keys(pen_obj, {"kind", "s", "mu", "weights"}, {"kind"}, "problem.penalty")
    pen_weights = pen_obj.get("weights")
    if pen_weights is not None:
        pen_weights = np.array(pen_weights, dtype=float)
        if pen_weights.shape != (A.shape[1],):
            raise ConfigError("penalty.weights must have one entry per column of A")
    try:
        penalty = make_penalty(pen_obj["kind"], dim=A.shape[1], s=pen_obj.get("s"),
                               mu=pen_obj.get("mu"), weights=pen_weights)
    except ValueError as err:
        raise ConfigError(f"problem.penalty: {err}") from None
    try:
        problem = ProblemSpec(A=A, y_exact=y, penalty=penalty, p=p,
                              y_space=NormSpec(q=q, weights=weights))
    except ValueError as err:
        raise ConfigError(f"problem: {err}") from None
    return problem


def _parse_profile_grid(obj: dict) -> ProfileGridSpec:
    _require_keys(obj, {"rMin", "rMax", "pointsPerDecade"},
                  {"rMin", "rMax", "pointsPerDecade"}, "profileGrid")
    r_min = _positive(obj["rMin"], "profileGrid.rMin")
    r_max = _positive(obj["rMax"], "profileGrid.rMax")
    if r_min >= r_max:
        raise ConfigError("profileGrid.rMin must be smaller than rMax")
    ppd = obj["pointsPerDecade"]
    if not isinstance(ppd, int) or ppd < 1:
        raise ConfigError("profileGrid.pointsPerDecade must be a positive integer")
    return ProfileGridSpec(r_min, r_max, ppd)


def _parse_sweep(obj: dict) -> SweepSpec:
    _require_keys(obj, {"deltaMin", "deltaMax", "pointsPerDecade", "seeds", "mode",
                        "c1", "c2"}, {"deltaMin", "deltaMax"}, "sweep")
    lo = _positive(obj["deltaMin"], "sweep.deltaMin")
    hi = _positive(obj["deltaMax"], "sweep.deltaMax")
    if lo >= hi:
        raise ConfigError("sweep.deltaMin must be smaller than deltaMax")
    ppd = obj.get("pointsPerDecade", 5)
    if not isinstance(ppd, int) or ppd < 1:
        raise ConfigError("sweep.pointsPerDecade must be a positive integer")
    seeds = obj.get("seeds", [0, 1, 2])
    if (not isinstance(seeds, list) or not seeds
            or not all(isinstance(s, int) for s in seeds)):
        raise ConfigError("sweep.seeds must be a nonempty list of integers")
    mode = obj.get("mode", "both")
    if mode == "both":
        modes = NOISE_MODES
    elif mode in NOISE_MODES:
        modes = (mode,)
    else:
        raise ConfigError(f"sweep.mode must be 'both' or one of {NOISE_MODES}, got {mode!r}")
    c1 = _positive(obj.get("c1", 1.0), "sweep.c1")
    c2 = _positive(obj.get("c2", 1.0), "sweep.c2")
    if c1 > c2:
        raise ConfigError("sweep.c1 must not exceed c2")
    return SweepSpec(lo, hi, ppd, tuple(seeds), modes, c1, c2)


def _parse_solver(obj: dict) -> SolverSettings:
    _require_keys(obj, {"tikhonovTol", "innerTol", "profileTol", "maxIter"}, set(), "solver")
    kw = {}
    if "tikhonovTol" in obj:
        kw["tikhonov_tol"] = _positive(obj["tikhonovTol"], "solver.tikhonovTol")
    if "innerTol" in obj:
        kw["inner_tol"] = _positive(obj["innerTol"], "solver.innerTol")
    if "profileTol" in obj:
        kw["profile_tol"] = _positive(obj["profileTol"], "solver.profileTol")
    if "maxIter" in obj:
        mi = obj["maxIter"]
        if not isinstance(mi, int) or mi < 1:
            raise ConfigError("solver.maxIter must be a positive integer")
        kw["max_iter"] = mi
    return SolverSettings(**kw)


def parse_config(data: dict) -> RunConfig:
    _require_keys(data, {"problem", "profileGrid", "sweep", "solver", "output"},
                  {"problem", "profileGrid"}, "configuration")
    problem = _parse_problem(data["problem"])
    grid = _parse_profile_grid(data["profileGrid"])
    sweep = _parse_sweep(data["sweep"]) if "sweep" in data else None
    solver = _parse_solver(data.get("solver", {}))
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a string path")
    return RunConfig(problem=problem, profile_grid=grid, sweep=sweep,
                     solver=solver, output=output)


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read configuration {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"configuration {path} is not valid JSON: {err}") from None
    return parse_config(data)
