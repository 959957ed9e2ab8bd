import numpy as np
import pytest

from bregrates.penalties import (ElasticNet, L1, PowerNorm, SquaredL2,
                                 make_penalty, subgradient_check)

from oracles import golden_section_min

ALL_KINDS = [
    SquaredL2(dim=3),
    PowerNorm(s=1.5, dim=3),
    PowerNorm(s=2.0, dim=3),
    L1(dim=3),
    ElasticNet(mu=0.7, dim=3),
    SquaredL2(weights=[1.0, 2.0, 0.5]),
    L1(weights=[0.5, 1.0, 2.0]),
    ElasticNet(mu=2.0, weights=[1.0, 0.3, 1.5]),
]


def test_eval_squared_l2():
    assert SquaredL2(dim=2).value([3.0, 4.0]) == pytest.approx(12.5, abs=1e-15)


def test_eval_l1():
    assert L1(dim=3).value([1.0, -2.0, 0.0]) == pytest.approx(3.0, abs=1e-15)


def test_eval_elastic_net():
    # mu = 2 at (1, 1): 2 + 2
    assert ElasticNet(mu=2.0, dim=2).value([1.0, 1.0]) == pytest.approx(4.0, abs=1e-15)


def test_prox_squared_l2_shrinks():
    out = SquaredL2(dim=2).prox(np.array([2.0, 0.0]), 1.0)
    assert np.allclose(out, [1.0, 0.0], atol=1e-15)


def test_prox_l1_soft_threshold():
    out = L1(dim=2).prox(np.array([2.0, -0.5]), 1.0)
    assert np.allclose(out, [1.0, 0.0], atol=1e-15)
    # 1-d grid verification of the first coordinate
    fn = lambda t: 0.5 * (t - 2.0) ** 2 + abs(t)
    t_star, _ = golden_section_min(fn, -3.0, 3.0)
    assert t_star == pytest.approx(1.0, abs=1e-6)


def test_prox_l1_zero_fixed_point():
    for tau in (0.1, 1.0, 17.0):
        assert np.all(L1(dim=2).prox(np.zeros(2), tau) == 0.0)


def test_prox_power_norm_matches_1d_minimization():
    pen = PowerNorm(s=1.5, dim=1)
    for v, tau in [(2.0, 1.0), (-0.7, 0.3), (5.0, 2.5)]:
        out = pen.prox(np.array([v]), tau)
        fn = lambda t: 0.5 * (t - v) ** 2 + tau * abs(t) ** 1.5 / 1.5
        t_star, _ = golden_section_min(fn, -abs(v) - 1, abs(v) + 1)
        assert out[0] == pytest.approx(t_star, abs=1e-7)


def test_subgradient_check_quadratic_gradient():
    ok, violation = subgradient_check(SquaredL2(dim=2), [1.0, 0.0], [1.0, 0.0])
    assert ok and violation == 0.0


def test_subgradient_check_l1_interval_member():
    # 0.5 lies in the subdifferential interval [-1, 1] at the zero coordinate
    ok, violation = subgradient_check(L1(dim=2), [0.0, 1.0], [0.5, 1.0], tol=1e-10)
    assert ok
    assert violation <= 1e-12


def test_subgradient_check_l1_interval_violator():
    # 2 lies outside [-1, 1]: violation grows one-for-one with the probe step
    ok, violation = subgradient_check(L1(dim=2), [0.0, 1.0], [2.0, 1.0], tol=1e-6)
    assert not ok
    assert violation == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("pen", ALL_KINDS, ids=lambda p: f"{p.kind}-{id(p) % 97}")
def test_prox_optimality_certificate(pen):
    # (v - prox(v)) / tau must be a subgradient at the prox point
    rng = np.random.default_rng(23)
    for tau in (0.05, 1.0, 8.0):
        v = 3.0 * rng.standard_normal(pen.dim)
        x_hat = pen.prox(v, tau)
        xi = (v - x_hat) / tau
        ok, violation = subgradient_check(pen, x_hat, xi, tol=1e-8)
        assert ok, f"violation {violation:.3e} for {pen.kind} tau={tau}"


@pytest.mark.parametrize("pen", ALL_KINDS, ids=lambda p: f"{p.kind}-{id(p) % 97}")
def test_convexity_probe(pen):
    rng = np.random.default_rng(29)
    for _ in range(40):
        x = 2.0 * rng.standard_normal(pen.dim)
        z = 2.0 * rng.standard_normal(pen.dim)
        lam = rng.uniform()
        lhs = pen.value(lam * x + (1 - lam) * z)
        rhs = lam * pen.value(x) + (1 - lam) * pen.value(z)
        assert lhs <= rhs + 1e-12


@pytest.mark.parametrize("pen", ALL_KINDS, ids=lambda p: f"{p.kind}-{id(p) % 97}")
def test_coercivity_probe(pen):
    # along rays, Omega(t x)/t is nondecreasing and bounded away from 0
    rng = np.random.default_rng(31)
    x = rng.standard_normal(pen.dim)
    x /= np.linalg.norm(x)
    ts = 2.0 ** np.arange(0, 12)
    vals = np.array([pen.value(t * x) / t for t in ts])
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[0] > 0.0
    assert vals[-1] >= vals[0]


@pytest.mark.parametrize("pen", ALL_KINDS, ids=lambda p: f"{p.kind}-{id(p) % 97}")
def test_min_at_zero(pen):
    assert pen.value(np.zeros(pen.dim)) == 0.0
    assert pen.min_value == 0.0


@pytest.mark.parametrize("pen", ALL_KINDS, ids=lambda p: f"{p.kind}-{id(p) % 97}")
def test_conjugate_fenchel_young(pen):
    # Omega(x) + Omega*(xi) >= <xi, x>, equality at xi = grad Omega(x)
    rng = np.random.default_rng(37)
    for _ in range(25):
        x = rng.standard_normal(pen.dim)
        xi = rng.standard_normal(pen.dim)
        conj = pen.conjugate(xi)
        if np.isfinite(conj):
            assert pen.value(x) + conj >= xi @ x - 1e-10
    g = pen.grad_or_none(x)
    if g is not None:
        assert pen.value(x) + pen.conjugate(g) == pytest.approx(float(g @ x), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("pen", [SquaredL2(dim=2), PowerNorm(s=1.5, dim=2),
                                 ElasticNet(mu=1.3, dim=2)],
                         ids=lambda p: p.kind)
def test_conjugate_grad_consistency(pen):
    # grad Omega*(xi) attains the sup in the conjugate
    rng = np.random.default_rng(41)
    for _ in range(20):
        xi = 2.0 * rng.standard_normal(2)
        x_star = pen.conjugate_grad(xi)
        assert pen.conjugate(xi) == pytest.approx(float(xi @ x_star) - pen.value(x_star),
                                                  rel=1e-9, abs=1e-11)


def test_make_penalty_validation():
    with pytest.raises(ValueError):
        make_penalty("Huber", dim=2)
    with pytest.raises(ValueError):
        make_penalty("PowerNorm", dim=2)            # missing s
    with pytest.raises(ValueError):
        make_penalty("PowerNorm", dim=2, s=2.5)      # s out of range
    with pytest.raises(ValueError):
        make_penalty("ElasticNet", dim=2, mu=-1.0)
    with pytest.raises(ValueError):
        make_penalty("L1", dim=2, s=1.5)             # stray parameter
    pen = make_penalty("PowerNorm", dim=3, s=1.5)
    assert pen.kind == "PowerNorm" and pen.dim == 3


def test_weights_validation():
    with pytest.raises(ValueError):
        L1(weights=[1.0, 0.0])
    with pytest.raises(ValueError):
        SquaredL2(weights=None, dim=None)
