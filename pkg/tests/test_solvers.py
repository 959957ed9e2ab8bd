import numpy as np
import pytest

from bregrates.penalties import L1, SquaredL2, ElasticNet
from bregrates.solvers import (SolveReport, operator_norm, primal_dual_core,
                               primal_dual_minimize, prox_grad_minimize)
from bregrates.spaces import NormSpec

from oracles import normal_equations_tikhonov


def quad_pieces(A, y, pen, alpha):
    A = np.atleast_2d(A)
    return dict(
        smooth_value=lambda x: 0.5 * np.sum((A @ x - y) ** 2),
        smooth_grad=lambda x: A.T @ (A @ x - y),
        prox=lambda v, tau: pen.prox(v, tau * alpha),
        penalty_value=lambda x: alpha * pen.value(x),
        lipschitz=operator_norm(A) ** 2,
    )


def test_prox_grad_scalar_quadratic():
    # min 1/2 (x-2)^2 + 1/2 x^2 has the stationary point x = 1
    pieces = quad_pieces(np.eye(1), np.array([2.0]), SquaredL2(dim=1), 1.0)
    rep = prox_grad_minimize(x0=np.zeros(1), tol=1e-12, **pieces)
    assert rep.converged
    assert rep.minimizer[0] == pytest.approx(1.0, abs=1e-10)
    assert rep.certificate_residual <= 1e-12


def test_prox_grad_pure_prox_reaches_zero():
    pen = L1(dim=2)
    rep = prox_grad_minimize(
        smooth_value=lambda x: 0.0,
        smooth_grad=lambda x: np.zeros_like(x),
        prox=lambda v, tau: pen.prox(v, tau),
        penalty_value=pen.value,
        x0=np.array([5.0, -5.0]), tol=1e-12)
    assert rep.converged
    assert np.allclose(rep.minimizer, 0.0, atol=1e-12)


def test_prox_grad_normal_equations_2d():
    A = np.eye(2)
    y = np.array([2.0, 4.0])
    pieces = quad_pieces(A, y, SquaredL2(dim=2), 1.0)
    rep = prox_grad_minimize(x0=np.zeros(2), tol=1e-12, **pieces)
    assert np.allclose(rep.minimizer, [1.0, 2.0], atol=1e-10)
    assert np.allclose(rep.minimizer, normal_equations_tikhonov(A, y, 1.0), atol=1e-10)


def test_prox_grad_monotone_up_to_restarts():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((12, 12)) * np.geomspace(1, 1e-3, 12)
    y = rng.standard_normal(12)
    pieces = quad_pieces(A, y, SquaredL2(dim=12), 1e-4)
    rep = prox_grad_minimize(x0=np.zeros(12), tol=1e-10,
                             record_objectives=True, **pieces)
    assert rep.converged
    trace = rep.objective_trace
    restarts = set(rep.restart_iterations)
    # decrease except within one step of a momentum restart
    for i in range(1, len(trace)):
        if {i - 1, i, i + 1} & restarts:
            continue
        assert trace[i] <= trace[i - 1] + 1e-12 * max(1.0, abs(trace[i - 1]))
    # final objective within 1e-9 of best-of-run
    assert rep.objective_value <= np.min(trace) + 1e-9


def test_prox_grad_non_convergence_reported():
    A = np.diag([1.0, 0.1])
    pieces = quad_pieces(A, np.array([1.0, 1.0]), SquaredL2(dim=2), 1e-6)
    rep = prox_grad_minimize(x0=np.zeros(2), tol=1e-300, max_iter=3, **pieces)
    assert not rep.converged
    assert rep.certificate_residual > 0.0
    assert isinstance(rep, SolveReport)


def test_prox_grad_deterministic():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((6, 6))
    y = rng.standard_normal(6)
    pieces = quad_pieces(A, y, ElasticNet(mu=0.5, dim=6), 0.3)
    rep1 = prox_grad_minimize(x0=np.zeros(6), tol=1e-11, **pieces)
    rep2 = prox_grad_minimize(x0=np.zeros(6), tol=1e-11, **pieces)
    assert np.array_equal(rep1.minimizer, rep2.minimizer)
    assert rep1.iterations == rep2.iterations
    assert rep1.objective_value == rep2.objective_value


def test_primal_dual_scalar_piecewise():
    # min 1/2 x^2 + 0.5 |x - 1|: piecewise calculus gives x = 0.5, value 0.375
    # a duality gap of eps only pins the minimizer down to sqrt(2 eps / gamma)
    for method, tol, x_tol in (("dual", 1e-14, 1e-6), ("cp", 1e-12, 2e-6)):
        rep = primal_dual_minimize(np.eye(1), np.array([1.0]), 0.5,
                                   SquaredL2(dim=1), tol=tol, method=method,
                                   max_iter=400_000)
        assert rep.converged, method
        assert rep.minimizer[0] == pytest.approx(0.5, abs=x_tol)
        assert rep.objective_value == pytest.approx(0.375, abs=1e-9)


def test_primal_dual_zero_radius_reduces_to_penalty_min():
    rep = primal_dual_minimize(np.eye(2), np.array([3.0, -1.0]), 0.0, L1(dim=2))
    assert rep.converged
    assert np.all(rep.minimizer == 0.0)


def test_primal_dual_l1_feasibility_enforcement():
    # min ||x||_1 + 10 |x1 + 2 x2 - 2|: feasibility binds, then minimum-l1 on the line
    rep = primal_dual_minimize(np.array([[1.0, 2.0]]), np.array([2.0]), 10.0,
                               L1(dim=2), tol=1e-10, max_iter=400_000)
    assert rep.converged
    assert np.allclose(rep.minimizer, [0.0, 1.0], atol=1e-6)
    assert rep.objective_value == pytest.approx(1.0, abs=1e-8)


def test_primal_dual_methods_agree():
    rng = np.random.default_rng(8)
    A = rng.standard_normal((5, 5)) * np.geomspace(1, 0.01, 5)
    xt = rng.standard_normal(5)
    b = A @ xt
    pen = ElasticNet(mu=1.0, dim=5)
    for r in (0.5, 5.0):
        rd = primal_dual_minimize(A, b, r, pen, tol=1e-10, method="dual")
        rc = primal_dual_minimize(A, b, r, pen, tol=1e-10, method="cp",
                                  max_iter=400_000)
        assert rd.converged and rc.converged
        assert np.linalg.norm(rd.minimizer - rc.minimizer) <= 1e-6
        assert rd.objective_value == pytest.approx(rc.objective_value, abs=1e-8)


def test_primal_dual_deterministic():
    A = np.array([[1.0, 2.0], [0.0, 0.5]])
    b = np.array([1.0, 0.2])
    rep1 = primal_dual_minimize(A, b, 3.0, L1(dim=2), tol=1e-9, method="cp")
    rep2 = primal_dual_minimize(A, b, 3.0, L1(dim=2), tol=1e-9, method="cp")
    assert np.array_equal(rep1.minimizer, rep2.minimizer)
    assert rep1.iterations == rep2.iterations


def test_primal_dual_requires_smooth_conjugate_for_dual_mode():
    with pytest.raises(ValueError):
        primal_dual_minimize(np.eye(2), np.zeros(2), 1.0, L1(dim=2), method="dual")


def test_cross_engine_agreement_smooth_data_term():
    # both engines on min 1/2||Ax - y||^2 + alpha/2 ||x||^2 agree to 1e-6
    rng = np.random.default_rng(17)
    A = rng.standard_normal((4, 4))
    y = rng.standard_normal(4)
    alpha = 0.3
    pen = SquaredL2(dim=4)
    pieces = quad_pieces(A, y, pen, alpha)
    rep_pg = prox_grad_minimize(x0=np.zeros(4), tol=1e-12, **pieces)

    # squared data term f(z) = 1/2||z - y||^2: prox of sigma f* is (v - sigma y)/(1 + sigma)
    def dual_value(zeta):
        return float(-(zeta @ y) - 0.5 * zeta @ zeta
                     - 0.5 / alpha * np.sum((A.T @ zeta) ** 2))

    rep_cp = primal_dual_core(
        A,
        prox_fstar=lambda v, sigma: (v - sigma * y) / (1.0 + sigma),
        prox_g=lambda v, tau: pen.prox(v, tau * alpha),
        primal_value=lambda x: 0.5 * np.sum((A @ x - y) ** 2) + alpha * pen.value(x),
        dual_value=dual_value,
        tol=1e-14, strong_convexity=alpha)
    assert rep_cp.converged
    assert np.linalg.norm(rep_pg.minimizer - rep_cp.minimizer) <= 1e-6
    oracle = normal_equations_tikhonov(A, y, alpha)
    assert np.linalg.norm(rep_pg.minimizer - oracle) <= 1e-8
    assert np.linalg.norm(rep_cp.minimizer - oracle) <= 1e-6
