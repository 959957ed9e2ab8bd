import numpy as np
import pytest

import bregrates as br
from bregrates.experiments import (RATES_CSV_HEADER, RateRecord, fit_rate_exponent,
                                   log_grid, lower_bound_scale, make_noise,
                                   noise_free_identity, records_to_csv_string,
                                   remove_constant_check, run_sweep,
                                   upper_bound_constant)
from bregrates.penalties import SquaredL2
from bregrates.rates import DistanceProfile
from bregrates.regularization import ProblemSpec
from bregrates.spaces import NormSpec


def synthetic_record(delta, b, seed=0, mode="randomUnit"):
    return RateRecord(delta=delta, alpha=1.0, seed=seed, mode=mode, b_skewed=b,
                      eta_dual_norm=1.0, phi_delta=1.0, lower_bound=0.0, d_of_eta=0.0,
                      residual_norm=1.0, upper_constant=1.0, phi_inv_delta=1.0,
                      ok_lower=True, ok_eta=True, ok_doeta=True, ok_upper=True)


def test_constants():
    assert lower_bound_scale(2.0, 1.0) == 9.0
    assert upper_bound_constant(2.0, 1.0, 1.0) == pytest.approx(15.0, rel=1e-15)
    # p = 3: (2*4*1+1)^(1/2) + 1 + 9 = 13
    assert upper_bound_constant(3.0, 1.0, 1.0) == pytest.approx(13.0, rel=1e-15)


def test_make_noise_zero_level():
    prob = br.problems.load("diag8").problem
    y = make_noise(prob, 0.0, "randomUnit", 3)
    assert np.array_equal(y, prob.y_exact)


@pytest.mark.parametrize("mode", ["randomUnit", "topSingular"])
def test_make_noise_exact_magnitude(mode):
    prob = br.problems.load("diag8").problem
    for delta in (1e-4, 1e-2, 1.0):
        for seed in range(5):
            y = make_noise(prob, delta, mode, seed)
            realized = prob.y_space.norm(y - prob.y_exact)
            assert abs(realized / delta - 1.0) <= 1e-12


def test_make_noise_exact_magnitude_weighted_q3():
    prob = ProblemSpec(A=np.eye(3), y_exact=[1.0, 2.0, 3.0],
                       penalty=SquaredL2(dim=3), p=2.0,
                       y_space=NormSpec(q=3.0, weights=[1.0, 0.5, 2.0]))
    y = make_noise(prob, 0.37, "randomUnit", 11)
    assert prob.y_space.norm(y - prob.y_exact) == pytest.approx(0.37, rel=1e-13)


def test_make_noise_top_singular_diagonal():
    # leading left singular vector of diag(1, 0.1) is +-e1; sign fixed positive
    prob = ProblemSpec(A=np.diag([1.0, 0.1]), y_exact=[1.0, 0.1],
                       penalty=SquaredL2(dim=2), p=2.0)
    y = make_noise(prob, 0.5, "topSingular", 0)
    assert np.allclose(y - prob.y_exact, [0.5, 0.0], atol=1e-14)


def test_make_noise_reproducible_and_mode_checked():
    prob = br.problems.load("diag8").problem
    a = make_noise(prob, 0.1, "randomUnit", 42)
    b = make_noise(prob, 0.1, "randomUnit", 42)
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        make_noise(prob, 0.1, "gaussian", 0)
    with pytest.raises(ValueError):
        make_noise(prob, -0.1, "randomUnit", 0)


def test_noise_free_identity_on_diag8(shipped):
    _, problem, exact = shipped["diag8"]
    recs = noise_free_identity(problem, exact, [1e-1, 1e-2, 1e-3])
    for rec in recs:
        assert rec.abs_gap <= 1e-6 * max(rec.b_skewed, 1e-12)


def test_run_sweep_records_and_determinism(shipped, shipped_profiles):
    _, problem, exact = shipped["scalar1"]
    profile, _ = shipped_profiles["scalar1"]
    deltas = [1e-3, 1e-2]
    recs1, diag1 = run_sweep(problem, exact, profile, deltas, seeds=(0, 1))
    recs2, diag2 = run_sweep(problem, exact, profile, deltas, seeds=(0, 1))
    assert not diag1 and not diag2
    assert len(recs1) == len(deltas) * 2 * 2
    assert records_to_csv_string(recs1) == records_to_csv_string(recs2)
    assert all(r.all_ok for r in recs1)
    # deterministic ordering: sorted by delta, then mode order, then seed
    keys = [(r.delta, r.mode, r.seed) for r in recs1]
    assert keys == sorted(keys, key=lambda k: (k[0], ("randomUnit", "topSingular").index(k[1]), k[2]))


def test_run_sweep_rejects_uncovered_delta(shipped, shipped_profiles):
    _, problem, exact = shipped["scalar1"]
    profile, _ = shipped_profiles["scalar1"]
    with pytest.raises(br.ProfileRangeError):
        run_sweep(problem, exact, profile, [1e3])


def test_csv_header_and_formatting():
    recs = [synthetic_record(0.1, 0.25)]
    text = records_to_csv_string(recs)
    lines = text.splitlines()
    assert lines[0] == RATES_CSV_HEADER
    assert lines[1].startswith("0.1,1.0,0,randomUnit,0.25,")
    assert lines[1].endswith("true,true,true,true")


def test_fit_rate_exponent_linear():
    recs = [synthetic_record(d, d) for d in np.geomspace(1e-4, 1e-1, 10)]
    fit = fit_rate_exponent(recs)
    assert fit.kappa == pytest.approx(1.0, abs=1e-12)
    assert fit.residual_rms <= 1e-12
    assert fit.n_used == 10


def test_fit_rate_exponent_two_thirds():
    recs = [synthetic_record(d, d ** (2.0 / 3.0)) for d in np.geomspace(1e-4, 1e-1, 12)]
    fit = fit_rate_exponent(recs)
    assert fit.kappa == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_fit_rate_exponent_degenerate_and_errors():
    zeros = [synthetic_record(d, 0.0) for d in (1e-3, 1e-2, 1e-1)]
    fit = fit_rate_exponent(zeros)
    assert fit.degenerate and fit.n_used == 0
    with pytest.raises(ValueError):
        fit_rate_exponent([])
    with pytest.raises(ValueError):
        fit_rate_exponent([synthetic_record(1e-2, 1e-2), synthetic_record(1e-1, 1e-1)])


def test_fit_rate_exponent_tracks_phi_slope():
    # mismatched smoothness x+_i = sigma_i^0.5 keeps the window away from the
    # benchmark radius, so B tracks the rate function (classical slope ~ 2/3)
    n = 10
    sig = 2.0 ** -np.arange(1, n + 1)
    xt = sig ** 0.5
    prob = ProblemSpec(A=np.diag(sig), y_exact=sig * xt,
                       penalty=SquaredL2(dim=n), p=2.0)
    exact = br.ExactSolution(x=xt, penalty_value=0.5 * float(xt @ xt),
                             feasibility_residual=0.0, xi_dagger=xt)
    r0 = np.linalg.norm(xt / sig)
    profile = br.build_profile(prob, exact, 0.05, 2 * r0, 12)
    lo, hi = profile.phi_window()
    deltas = np.geomspace(max(lo * 1.5, 1e-5), min(hi / 2, 1e-1), 10)
    records, diags = run_sweep(prob, exact, profile, deltas, seeds=(0,),
                               modes=("randomUnit",))
    assert not diags
    fit = fit_rate_exponent(records)
    ld = np.log([r.delta for r in records])
    lp = np.log([r.phi_delta for r in records])
    phi_slope = float(np.polyfit(ld, lp, 1)[0])
    assert phi_slope - 0.1 <= fit.kappa <= 1.0


def power_law_profile(a=2.0, lo=1e-2, hi=1e3, ppd=200):
    r = np.geomspace(lo, hi, int(np.ceil(ppd * np.log10(hi / lo))) + 1)
    return DistanceProfile.from_table(r, r ** (-a))


def test_remove_constant_power_law():
    # D = r^-2: Phi^-1(t) = t^(-1/3), ratio D(r)/D(cr) = c^2 exactly
    profile = power_law_profile(2.0)
    c = 2.0
    report = remove_constant_check(profile, c, np.geomspace(1e-3, 1e-1, 9))
    assert len(report.ratios) == 9
    assert np.allclose(report.ratios, c * c, atol=1e-10)
    assert report.bounded
    assert not report.increasing_toward_zero


def test_remove_constant_identity_scale():
    profile = power_law_profile(1.5)
    report = remove_constant_check(profile, 1.0, np.geomspace(1e-2, 1e-1, 5))
    assert np.all(report.ratios == 1.0)
    assert report.bounded


def test_remove_constant_exponential_unbounded():
    r = np.geomspace(0.5, 60.0, 1500)
    profile = DistanceProfile.from_table(r, np.exp(-r))
    report = remove_constant_check(profile, 2.0, np.geomspace(1e-3, 1e-1, 12))
    assert len(report.ratios) >= 5
    assert report.increasing_toward_zero
    assert not report.bounded
    assert report.spread > 10.0


def test_remove_constant_skips_out_of_range():
    profile = power_law_profile(2.0, lo=1e-1, hi=10.0, ppd=50)
    report = remove_constant_check(profile, 50.0, [1e-2])
    assert report.points[0].skipped
    assert "extend rGrid" in report.points[0].reason


def test_log_grid_density():
    g = log_grid(1e-4, 1e-1, 5)
    assert g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e-1)
    assert len(g) == 16


def test_run_sweep_benchmark_linear_rate(shipped):
    # benchmark regime (D hits zero): B = O(delta), i.e. B/delta stays
    # bounded over two decades and does not grow as delta -> 0
    cfg, problem, exact = shipped["benchmark4"]
    g = cfg.profile_grid
    profile = br.build_profile(problem, exact, g.r_min, g.r_max, g.points_per_decade)
    deltas = log_grid(3e-3, 3e-1, 5)
    records, diags = run_sweep(problem, exact, profile, deltas, seeds=(0,),
                               modes=("randomUnit",))
    assert not diags
    assert all(r.all_ok for r in records)
    ratios = np.array([r.b_skewed / r.delta for r in records])
    assert np.max(ratios) <= 1.0
    assert ratios[0] <= ratios[-1]  # no blow-up toward delta -> 0


def test_run_sweep_aborts_failed_records_with_diagnostics(shipped, shipped_profiles):
    _, problem, exact = shipped["diag8"]
    profile, _ = shipped_profiles["diag8"]
    records, diags = run_sweep(problem, exact, profile, [1e-2], seeds=(0,),
                               modes=("randomUnit",), max_iter=5)
    assert not records
    assert len(diags) == 1
    assert diags[0].delta == 1e-2 and diags[0].seed == 0
    assert "certify" in diags[0].message
