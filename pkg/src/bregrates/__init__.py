"""Tikhonov regularization of ill-posed linear equations with two-sided
(upper and converse) convergence-rate verification in skewed Bregman
distances, including construction of the optimal rate function from the
distance function of the penalty-minimal solution."""

from .spaces import NormSpec, DimensionMismatchError
from .penalties import (ElasticNet, L1, Penalty, PowerNorm, SquaredL2,
                        make_penalty, subgradient_check)
from .solvers import (SolveReport, SolverError, operator_norm,
                      primal_dual_core, primal_dual_minimize, prox_grad_minimize)
from .regularization import (CertificationError, ExactSolution,
                             InconsistentDataError, ProblemSpec,
                             RegularizedSolution, bregman, omega_min_solution,
                             skewed_bregman, solve_tikhonov)
from .rates import (BenchmarkRegimeError, DistanceProfile, IndexFunction,
                    ProfileRangeError, VscReport, build_profile, check_vsc,
                    choose_alpha, distance_d, rate_function_from_profile)
from .experiments import (ConstantRemovalReport, IdentityRecord, RateFit,
                          RateRecord, SweepDiagnostic, fit_rate_exponent,
                          log_grid, lower_bound_scale, make_noise,
                          noise_free_identity, records_to_csv,
                          records_to_csv_string, remove_constant_check,
                          run_sweep, upper_bound_constant)
from .config import ConfigError, RunConfig, load_config, parse_config
from . import problems

__version__ = "0.1.0"

__all__ = [
    "NormSpec", "DimensionMismatchError",
    "Penalty", "SquaredL2", "PowerNorm", "L1", "ElasticNet", "make_penalty",
    "subgradient_check",
    "SolveReport", "SolverError", "operator_norm", "prox_grad_minimize",
    "primal_dual_minimize", "primal_dual_core",
    "ProblemSpec", "RegularizedSolution", "ExactSolution", "solve_tikhonov",
    "omega_min_solution", "bregman", "skewed_bregman",
    "CertificationError", "InconsistentDataError",
    "DistanceProfile", "IndexFunction", "VscReport", "distance_d",
    "build_profile", "rate_function_from_profile", "check_vsc", "choose_alpha",
    "ProfileRangeError", "BenchmarkRegimeError",
    "RateRecord", "RateFit", "IdentityRecord", "SweepDiagnostic",
    "ConstantRemovalReport", "make_noise", "run_sweep", "noise_free_identity",
    "fit_rate_exponent", "remove_constant_check", "log_grid",
    "lower_bound_scale", "upper_bound_constant", "records_to_csv",
    "records_to_csv_string",
    "RunConfig", "ConfigError", "load_config", "parse_config", "problems",
]
