"""Tikhonov minimization with dual certificates, penalty-minimal solutions,
and Bregman distances.

The central object is the variational problem

    min_x  (1/p) ||A x - y||_Y^p + alpha * Omega(x),

whose minimizers are certified through the dual element
eta = -(1/alpha) * d((1/p)||.||^p)(A x - y): the vector xi = A^T eta must be
a subgradient of Omega at the minimizer, which is checked explicitly on
every accepted solution. That xi is also what anchors the skewed Bregman
distance between the penalty-minimal solution and the regularized one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .penalties import Penalty, subgradient_check
from .solvers import SolveReport, SolverError, operator_norm, primal_dual_minimize, prox_grad_minimize
from .spaces import NormSpec

#: default engine tolerances; sweep-scale alphas need the subgradient-aware
#: target since dist(A^T eta, dOmega(x)) <= 2 * ||gradient map|| / alpha
TIKHONOV_TOL = 1e-10
XI_TOL = 5e-8
MAX_ITER = 200_000


class CertificationError(RuntimeError):
    """An accepted solution failed one of its optimality certificates."""


class InconsistentDataError(RuntimeError):
    """A x = y admits no solution within tolerance: the exact-data premise fails."""


@dataclass(frozen=True)
class ProblemSpec:
    """One regularization instance: operator, exact data, penalty, exponents.

    Parameters
    ----------
    A : (m, n) array
        Dense forward operator.
    y_exact : (m,) array
        Exact right-hand side; A x = y_exact must be solvable.
    penalty : Penalty
        The stabilizing functional Omega (dimension n).
    p : float
        Fitting exponent, > 1.
    y_space : NormSpec, optional
        Norm on the data space (Euclidean default).
    """

    A: np.ndarray = field(repr=False)
    y_exact: np.ndarray = field(repr=False)
    penalty: Penalty
    p: float
    y_space: NormSpec = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        object.__setattr__(self, "A", A)
        y = np.asarray(self.y_exact, dtype=float).reshape(A.shape[0])
        object.__setattr__(self, "y_exact", y)
        if self.p <= 1.0:
            raise ValueError(f"fitting exponent p must exceed 1, got {self.p}")
        if self.y_space is None:
            object.__setattr__(self, "y_space", NormSpec.euclidean(A.shape[0]))
        if self.y_space.dim != A.shape[0]:
            raise ValueError("y_space dimension does not match A")
        if self.penalty.dim != A.shape[1]:
            raise ValueError("penalty dimension does not match A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
            raise ValueError("A and y_exact must be finite")

    @property
    def x_dim(self) -> int:
        return self.A.shape[1]

    @property
    def y_dim(self) -> int:
        return self.A.shape[0]

    def fitting_value(self, x, y) -> float:
        return self.y_space.norm(self.A @ x - y) ** self.p / self.p

    def fitting_grad(self, x, y) -> np.ndarray:
        return self.A.T @ self.y_space.fitting_gradient(self.A @ x - y, self.p)

    def tikhonov_value(self, x, y, alpha: float) -> float:
        return self.fitting_value(x, y) + alpha * self.penalty.value(x)


@dataclass
class RegularizedSolution:
    """A certified Tikhonov minimizer together with its dual certificate."""

    x: np.ndarray
    eta: np.ndarray
    xi: np.ndarray
    alpha: float
    delta: float
    y_noisy: np.ndarray
    residual_norm: float
    optimality_gap: float
    report: SolveReport = field(repr=False)


@dataclass
class ExactSolution:
    """A penalty-minimal solution of A x = y_exact.

    xi_dagger is the single-valued subgradient of Omega at x when one
    exists (absent at kinks of nonsmooth kinds); the classic Bregman
    distance anchored at x is available only in that case.
    """

    x: np.ndarray
    penalty_value: float
    feasibility_residual: float
    xi_dagger: np.ndarray | None = None


def solve_tikhonov(problem: ProblemSpec, y_noisy, alpha: float,
                   tol: float = TIKHONOV_TOL, xi_tol: float = XI_TOL,
                   max_iter: int = MAX_ITER, x0=None) -> RegularizedSolution:
    """Minimize the Tikhonov functional and certify the result.

    The returned solution always satisfies, up to the stated tolerances:
    eta = -(1/alpha) * fitting_gradient(A x - y_noisy), the dual-norm
    identity ||eta||_* = residual^(p-1)/alpha, and membership of
    xi = A^T eta in the penalty subdifferential at x (probed at 1e-6).

    Raises
    ------
    SolverError
        If the engine does not reach its certificate (never a silent
        partial result).
    CertificationError
        If an accepted iterate fails an exactness check.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    y = np.asarray(y_noisy, dtype=float).reshape(problem.y_dim)
    lip = None
    if problem.p == 2.0 and problem.y_space.q == 2.0:
        lip = operator_norm(np.sqrt(problem.y_space.weights)[:, None] * problem.A) ** 2

    report = prox_grad_minimize(
        smooth_value=lambda x: problem.fitting_value(x, y),
        smooth_grad=lambda x: problem.fitting_grad(x, y),
        prox=lambda v, tau: problem.penalty.prox(v, tau * alpha),
        penalty_value=lambda x: alpha * problem.penalty.value(x),
        x0=np.zeros(problem.x_dim) if x0 is None else x0,
        tol=tol, max_iter=max_iter, lipschitz=lip,
        grad_map_tol=alpha * xi_tol / 2.0,
    )
    if not report.converged:
        raise SolverError(
            f"Tikhonov solve did not certify at alpha={alpha:g} "
            f"(residual {report.certificate_residual:.3e} after {report.iterations} iterations)",
            report)
    x = report.minimizer
    rho = problem.A @ x - y
    eta = -problem.y_space.fitting_gradient(rho, problem.p) / alpha
    xi = problem.A.T @ eta
    residual_norm = problem.y_space.norm(rho)

    expected_dual = residual_norm ** (problem.p - 1.0) / alpha
    dual_eta = problem.y_space.dual_norm(eta)
    if abs(dual_eta - expected_dual) > 1e-10 * max(expected_dual, 1e-300):
        raise CertificationError(
            f"dual-norm identity violated: ||eta||_*={dual_eta!r} vs "
            f"residual^(p-1)/alpha={expected_dual!r}")
    ok, violation = subgradient_check(problem.penalty, x, xi, tol=1e-6)
    if not ok:
        raise CertificationError(
            f"A^T eta is not a penalty subgradient at the solution "
            f"(violation {violation:.3e} > 1e-6)")

    delta = problem.y_space.norm(y - problem.y_exact)
    return RegularizedSolution(x=x, eta=eta, xi=xi, alpha=float(alpha), delta=float(delta),
                               y_noisy=y, residual_norm=float(residual_norm),
                               optimality_gap=float(report.certificate_residual),
                               report=report)


def omega_min_solution(problem: ProblemSpec, feas_tol: float = 1e-8,
                       tol: float = 1e-10, max_iter: int = MAX_ITER) -> ExactSolution:
    """Compute a penalty-minimal solution of A x = y_exact.

    Strategy: vanishing-alpha continuation (warm-started Tikhonov solves on
    the exact data) until the residual stabilizes near zero, which also
    yields a growing dual estimate ||eta_alpha||; then an exact-penalty
    polish min Omega(x) + R ||A x - y||_Y with R a safe multiple of that
    estimate, which pins the feasible penalty minimizer exactly.
    """
    y = problem.y_exact
    scale = max(1.0, problem.y_space.norm(y))
    alpha = 0.1 * max(operator_norm(problem.A) ** 2, 1e-8)
    x = np.zeros(problem.x_dim)
    r_hat = 1.0
    residual = np.inf
    stalls = 0
    for _ in range(40):
        sol = solve_tikhonov(problem, y, alpha, tol=tol, xi_tol=1e-4, max_iter=max_iter, x0=x)
        x = sol.x
        r_hat = max(r_hat, problem.y_space.dual_norm(sol.eta))
        # a residual that stops shrinking as alpha vanishes means no solution
        stalls = stalls + 1 if sol.residual_norm > 0.7 * residual else 0
        residual = sol.residual_norm
        if residual <= 1e-3 * scale:
            break
        if stalls >= 2:
            raise InconsistentDataError(
                f"residual plateaued at {residual:.3e} during continuation; "
                "A x = y_exact appears unsolvable")
        alpha *= 0.1
    else:
        raise InconsistentDataError(
            f"residual plateaued at {residual:.3e} during continuation; "
            "A x = y_exact appears unsolvable")

    for r_big in (4.0 * r_hat, 40.0 * r_hat, 400.0 * r_hat):
        report = primal_dual_minimize(problem.A, y, r_big, problem.penalty,
                                      y_space=problem.y_space, x0=x,
                                      tol=min(tol, 1e-10), max_iter=max_iter)
        if not report.converged:
            raise SolverError("exact-penalty polish did not certify", report)
        x_pol = report.minimizer
        feas = problem.y_space.norm(problem.A @ x_pol - y)
        if feas <= feas_tol * scale:
            _probe_penalty_minimality(problem, x_pol)
            return ExactSolution(x=x_pol, penalty_value=problem.penalty.value(x_pol),
                                 feasibility_residual=float(feas),
                                 xi_dagger=problem.penalty.grad_or_none(x_pol))
    raise InconsistentDataError(
        f"exact-penalty polish left residual {feas:.3e} > {feas_tol * scale:.3e}; "
        "A x = y_exact appears unsolvable")


def _probe_penalty_minimality(problem: ProblemSpec, x: np.ndarray, tol: float = 1e-8):
    """No probed feasible perturbation of x may lower the penalty."""
    from .penalties import probe_directions

    _, _, vt = np.linalg.svd(problem.A)
    rank = int(np.sum(np.linalg.svd(problem.A, compute_uv=False) >
                      1e-12 * max(1.0, operator_norm(problem.A))))
    if rank >= problem.x_dim:
        return
    null_basis = vt[rank:].T
    base = problem.penalty.value(x)
    for d in probe_directions(problem.x_dim):
        nu = null_basis @ (null_basis.T @ d)
        nn = np.linalg.norm(nu)
        if nn < 1e-12:
            continue
        nu /= nn
        for s in (1e-3, 1e-2, 1e-1, 1.0):
            if problem.penalty.value(x + s * nu) < base - tol:
                raise CertificationError(
                    "feasible perturbation lowers the penalty: "
                    "the computed point is not penalty-minimal")


def bregman(penalty: Penalty, x, x_bar, xi_bar, membership_tol: float = 1e-8) -> float:
    """Bregman distance Omega(x) - Omega(x_bar) - <xi_bar, x - x_bar>.

    xi_bar must pass the subgradient membership probe at x_bar, otherwise
    the distance is undefined and a ValueError is raised.
    """
    x = np.asarray(x, dtype=float)
    x_bar = np.asarray(x_bar, dtype=float)
    xi_bar = np.asarray(xi_bar, dtype=float)
    ok, violation = subgradient_check(penalty, x_bar, xi_bar, tol=membership_tol)
    if not ok:
        raise ValueError(
            f"xi_bar is not a subgradient at x_bar (violation {violation:.3e}); "
            "Bregman distance undefined")
    return penalty.value(x) - penalty.value(x_bar) - float(xi_bar @ (x - x_bar))


def skewed_bregman(sol: RegularizedSolution, exact: ExactSolution, penalty: Penalty) -> float:
    """Bregman distance from the exact solution to the regularized one,
    anchored at the regularized solution's automatic subgradient A^T eta."""
    return (penalty.value(exact.x) - penalty.value(sol.x)
            - float(sol.xi @ (exact.x - sol.x)))
