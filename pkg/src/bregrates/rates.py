"""Distance-function machinery: D(r), Phi = D(r)/r, its inverse, the optimal
rate function, source-condition checking, and the a priori parameter choice.

For a penalty-minimal solution x+ of A x = y the distance function

    D(r) = sup_x ( Omega(x+) - Omega(x) - r ||A x - A x+||_Y ),  r >= 0,

is continuous, nonincreasing, convex, and tends to 0; it vanishes for some
finite r exactly when the linear-rate benchmark source condition holds.
Sampling D on a log grid (each node a certified solve of the inner problem)
yields everything the two-sided rate bounds need: Phi(r) = D(r)/r has a
well-defined inverse on the positive window, and

    phi(t) = 2 D(Phi^{-1}(t)),  phi(0) = 0,

is an admissible rate function: increasing, with t -> phi(t)/t nonincreasing,
and the associated variational inequality

    0 <= Omega(x) - Omega(x+) + phi(||A x - A x+||)   for all x

holds by construction. Outside the sampled window the oracle falls back to
the affine majorants D(r_edge) + r_edge * t obtained from the defining
inequality of D at the window edges, which keep the inequality valid
without extrapolating the profile.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .penalties import probe_directions
from .regularization import ExactSolution, ProblemSpec
from .solvers import SolveReport, SolverError, primal_dual_minimize

MONOTONE_SLACK = 1e-7
CONVEXITY_SLACK = 1e-7
PROFILE_TOL = 1e-9   # per-node gap target; 10x headroom under the certificates
DISTANCE_TOL = 1e-8


class ProfileRangeError(ValueError):
    """Requested point is outside the sampled r-grid: extend rGrid."""


class BenchmarkRegimeError(ValueError):
    """D(r) = 0 at the requested point: Phi is undefined there."""


def distance_d(problem: ProblemSpec, exact: ExactSolution, r: float,
               tol: float = DISTANCE_TOL, max_iter: int = 200_000,
               method: str = "auto"):
    """Evaluate D(r) = Omega(x+) - min_x { Omega(x) + r ||A(x - x+)||_Y }.

    The inner minimum is computed by the primal-dual engine; the reported
    value uses the certified primal side and is clamped at 0 (x = x+ is
    always admissible), so it underestimates the true D by at most the
    duality gap. Returns (value, SolveReport).
    """
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    omega_dagger = exact.penalty_value
    if r == 0.0:
        # inner minimum is the penalty minimum, which is 0 for every kind
        x = np.zeros(problem.x_dim)
        return float(omega_dagger), SolveReport(x, 0.0, 0, 0.0, True)
    b = problem.A @ exact.x
    report = primal_dual_minimize(problem.A, b, r, problem.penalty,
                                  y_space=problem.y_space, tol=tol,
                                  max_iter=max_iter, method=method)
    if not report.converged:
        raise SolverError(f"distance-function solve at r={r:g} did not certify "
                          f"(gap {report.certificate_residual:.3e})", report)
    return max(float(omega_dagger - report.objective_value), 0.0), report


@dataclass
class DistanceProfile:
    """Certified-monotone sampled table of D(r) on a log-uniform grid.

    The table is the artifact: queries between nodes interpolate linearly
    in log-log coordinates (plain linear once a node hits zero), which
    preserves monotonicity. Certificates enforced at construction:
    nonincreasing up to isotonic repair below 1e-7, chord convexity defect
    <= 1e-7, and tail decay (last value below the first unless D == 0).
    """

    r_grid: np.ndarray
    d_values: np.ndarray
    reports: list = field(default_factory=list, repr=False)
    witnesses: list = field(default_factory=list, repr=False)
    problem: ProblemSpec | None = field(default=None, repr=False)
    exact: ExactSolution | None = field(default=None, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r_grid, dtype=float)
        d = np.asarray(self.d_values, dtype=float)
        if r.ndim != 1 or r.shape != d.shape or r.size == 0:
            raise ValueError("r_grid and d_values must be matching 1-d arrays")
        if not np.all(r > 0) or not np.all(np.diff(r) > 0):
            raise ValueError("r_grid must be strictly increasing and positive")
        if np.any(d < -1e-12):
            raise ValueError("d_values must be nonnegative")
        d = np.maximum(d, 0.0)
        worst_up = float(np.max(np.diff(d))) if d.size > 1 else 0.0
        if worst_up > MONOTONE_SLACK:
            raise ValueError(
                f"monotonicity violated by {worst_up:.3e} > {MONOTONE_SLACK:g}: "
                "solver misconfiguration")
        if worst_up > 0.0:
            d = _isotonic_nonincreasing(d)
        if d.size >= 3:
            chord = (d[:-2] * (r[2:] - r[1:-1]) + d[2:] * (r[1:-1] - r[:-2])) / (r[2:] - r[:-2])
            defect = float(np.max(d[1:-1] - chord))
            if defect > CONVEXITY_SLACK:
                raise ValueError(
                    f"convexity defect {defect:.3e} > {CONVEXITY_SLACK:g}: "
                    "solver misconfiguration")
        if d.size >= 2 and d[0] > 0.0 and not d[-1] < d[0]:
            raise ValueError("no tail decay across the grid: extend rGrid upward")
        self.r_grid = r
        self.d_values = d

    # -- queries ---------------------------------------------------------

    @property
    def r_min(self) -> float:
        return float(self.r_grid[0])

    @property
    def r_max(self) -> float:
        return float(self.r_grid[-1])

    @property
    def positive_r_max(self) -> float:
        """Largest grid node with D > 0 (the Phi window's right edge)."""
        pos = np.nonzero(self.d_values > 0.0)[0]
        if pos.size == 0:
            raise BenchmarkRegimeError("D vanishes on the whole grid: Phi undefined")
        return float(self.r_grid[pos[-1]])

    def d_at(self, r: float, extend_zero: bool = False, chord: bool = False) -> float:
        """Interpolated D(r) for r inside the grid range.

        Default interpolation is piecewise linear in log-log coordinates
        (exact on power-law decay). With ``chord`` the interpolation is the
        straight chord in original coordinates, which lies on or above the
        true convex D between nodes: the safe side for constructing rate
        functions. With ``extend_zero`` a query beyond r_max returns 0.0
        when the last node is 0 (D is nonnegative and nonincreasing, so
        that value is exact); anything else out of range raises
        ProfileRangeError.
        """
        r = float(r)
        rg, d = self.r_grid, self.d_values
        if r < rg[0]:
            raise ProfileRangeError(f"r={r:g} below sampled range: extend rGrid")
        if r > rg[-1]:
            if extend_zero and d[-1] == 0.0:
                return 0.0
            raise ProfileRangeError(f"r={r:g} beyond sampled range: extend rGrid")
        j = int(np.searchsorted(rg, r, side="right")) - 1
        if j == rg.size - 1:
            return float(d[-1])
        if r == rg[j]:
            return float(d[j])
        if chord:
            w = (r - rg[j]) / (rg[j + 1] - rg[j])
            return float((1.0 - w) * d[j] + w * d[j + 1])
        w = (np.log(r) - np.log(rg[j])) / (np.log(rg[j + 1]) - np.log(rg[j]))
        if d[j] > 0.0 and d[j + 1] > 0.0:
            return float(np.exp((1.0 - w) * np.log(d[j]) + w * np.log(d[j + 1])))
        return float((1.0 - w) * d[j] + w * d[j + 1])

    def phi_at(self, r: float, chord: bool = False) -> float:
        """Phi(r) = D(r)/r; undefined where the interpolated D vanishes."""
        dv = self.d_at(r, chord=chord)
        if dv <= 0.0:
            raise BenchmarkRegimeError(f"D(r)=0 at r={r:g}: benchmark regime, Phi undefined")
        return dv / float(r)

    def phi_window(self) -> tuple[float, float]:
        """(smallest, largest) Phi value covered by the positive window."""
        hi = self.d_values[0] / self.r_grid[0]
        lo = self.phi_at(self.positive_r_max)
        return float(lo), float(hi)

    def invert_phi(self, t: float, chord: bool = False) -> float:
        """The r with Phi(r) = t, by bisection on the monotone interpolant.

        Never extrapolates: t must lie inside the covered Phi window
        (identical for both interpolation modes, since they agree at nodes).
        """
        if t <= 0.0:
            raise ValueError(f"Phi inversion needs t > 0, got {t}")
        lo_t, hi_t = self.phi_window()
        if not lo_t <= t <= hi_t:
            raise ProfileRangeError(
                f"t={t:g} outside covered Phi range [{lo_t:g}, {hi_t:g}]: extend rGrid")
        lo, hi = self.r_min, self.positive_r_max
        if self.phi_at(hi, chord=chord) >= t:
            return hi
        for _ in range(200):
            mid = float(np.sqrt(lo * hi))
            if mid <= lo or mid >= hi:
                break
            if self.phi_at(mid, chord=chord) > t:
                lo = mid
            else:
                hi = mid
        return float(np.sqrt(lo * hi))

    # -- construction and serialization -----------------------------------

    @classmethod
    def from_table(cls, r_grid, d_values) -> "DistanceProfile":
        """Profile from a precomputed table (synthetic or cached data)."""
        return cls(r_grid=np.asarray(r_grid, dtype=float),
                   d_values=np.asarray(d_values, dtype=float))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["r", "D", "converged", "residual"])
            for i, (r, d) in enumerate(zip(self.r_grid, self.d_values)):
                rep = self.reports[i] if i < len(self.reports) else None
                writer.writerow([f"{r:.17g}", f"{d:.17g}",
                                 "true" if rep is None or rep.converged else "false",
                                 f"{(rep.certificate_residual if rep else 0.0):.17g}"])

    @classmethod
    def read_csv(cls, path) -> "DistanceProfile":
        rs, ds = [], []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != ["r", "D", "converged", "residual"]:
                raise ValueError(f"unexpected profile header {header!r}")
            for row in reader:
                if row[2] != "true":
                    raise ValueError(f"profile row r={row[0]} is uncertified")
                rs.append(float(row[0]))
                ds.append(float(row[1]))
        return cls.from_table(np.array(rs), np.array(ds))


def _isotonic_nonincreasing(d: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators projection onto nonincreasing sequences."""
    vals = list(d)
    weights = [1.0] * len(vals)
    out_v, out_w = [], []
    for v, w in zip(vals, weights):
        out_v.append(v)
        out_w.append(w)
        while len(out_v) > 1 and out_v[-2] < out_v[-1]:
            v2, w2 = out_v.pop(), out_w.pop()
            v1, w1 = out_v.pop(), out_w.pop()
            out_v.append((v1 * w1 + v2 * w2) / (w1 + w2))
            out_w.append(w1 + w2)
    repaired = np.empty_like(d)
    k = 0
    for v, w in zip(out_v, out_w):
        repaired[k:k + int(w)] = v
        k += int(w)
    return np.maximum(repaired, 0.0)


def build_profile(problem: ProblemSpec, exact: ExactSolution, r_min: float,
                  r_max: float, points_per_decade: int,
                  tol: float = PROFILE_TOL, max_iter: int = 200_000) -> DistanceProfile:
    """Sample D on a log-uniform grid with certified inner solves."""
    if not 0 < r_min < r_max:
        raise ValueError("need 0 < r_min < r_max")
    if points_per_decade < 1:
        raise ValueError("points_per_decade must be at least 1")
    n = int(np.ceil(points_per_decade * np.log10(r_max / r_min))) + 1
    grid = np.geomspace(r_min, r_max, n)
    values, reports, witnesses = [], [], []
    for r in grid:
        val, rep = distance_d(problem, exact, float(r), tol=tol, max_iter=max_iter)
        values.append(val)
        reports.append(rep)
        witnesses.append(rep.minimizer)
    return DistanceProfile(r_grid=grid, d_values=np.array(values), reports=reports,
                           witnesses=witnesses, problem=problem, exact=exact)


@dataclass
class IndexFunction:
    """A rate function t -> phi(t): continuous, increasing, phi(0) = 0,
    with t -> phi(t)/t nonincreasing.

    provenance records how it was built; window, when present, is the
    t-interval certified by a distance profile (outside it the oracle
    uses the edge majorants described in the module docstring).
    """

    oracle: callable = field(repr=False)
    provenance: str = "custom"
    window: tuple[float, float] | None = None

    def __call__(self, t: float) -> float:
        t = float(t)
        if t < 0:
            raise ValueError(f"index functions are defined on [0, inf), got {t}")
        if t == 0.0:
            return 0.0
        return float(self.oracle(t))

    def validate_on_grid(self, ts, slack: float = 1e-9):
        """Raise unless phi is increasing and phi/t nonincreasing on ts."""
        ts = np.sort(np.asarray(ts, dtype=float))
        if np.any(ts <= 0):
            raise ValueError("validation grid must be positive")
        vals = np.array([self(t) for t in ts])
        if np.any(vals <= 0):
            raise ValueError("phi must be positive for t > 0")
        if np.any(np.diff(vals) < -slack * np.maximum(1.0, vals[:-1])):
            raise ValueError("phi is not monotonically increasing on the grid")
        ratio = vals / ts
        if np.any(np.diff(ratio) > slack * np.maximum(1.0, ratio[:-1])):
            raise ValueError("phi(t)/t is not nonincreasing on the grid")

    @classmethod
    def from_power(cls, kappa: float, scale: float = 1.0) -> "IndexFunction":
        if not 0 < kappa <= 1:
            raise ValueError(f"power rate needs exponent in (0, 1], got {kappa}")
        if scale <= 0:
            raise ValueError("scale must be positive")
        return cls(oracle=lambda t: scale * t ** kappa, provenance=f"power:{kappa:g}")

    @classmethod
    def from_log(cls, a: float, scale: float = 1.0) -> "IndexFunction":
        """Logarithmic rate scale * ln(1 + 1/t)^(-a); validated numerically."""
        if a <= 0 or scale <= 0:
            raise ValueError("log rate needs a > 0 and scale > 0")
        fn = cls(oracle=lambda t: scale * np.log1p(1.0 / t) ** (-a),
                 provenance=f"log:{a:g}")
        fn.validate_on_grid(np.geomspace(1e-12, 1e3, 200))
        return fn

    @classmethod
    def from_table(cls, ts, values) -> "IndexFunction":
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
            raise ValueError("table needs matching 1-d arrays with >= 2 rows")
        if not (np.all(ts > 0) and np.all(np.diff(ts) > 0)):
            raise ValueError("table abscissae must be positive and increasing")
        if np.any(values <= 0) or np.any(np.diff(values) < 0):
            raise ValueError("table values must be positive and nondecreasing")
        ratio = values / ts
        if np.any(np.diff(ratio) > 1e-12 * np.maximum(1.0, ratio[:-1])):
            raise ValueError("table violates phi(t)/t nonincreasing")

        def oracle(t):
            if t <= ts[0]:
                return values[0] * t / ts[0]
            if t >= ts[-1]:
                slope = (values[-1] - values[-2]) / (ts[-1] - ts[-2])
                return values[-1] + slope * (t - ts[-1])
            return float(np.interp(t, ts, values))

        return cls(oracle=oracle, provenance="table", window=(float(ts[0]), float(ts[-1])))


def rate_function_from_profile(profile: DistanceProfile) -> IndexFunction:
    """The optimal rate function phi(t) = 2 D(Phi^{-1}(t)) from a profile.

    Defined for every t >= 0: inside the covered Phi window through the
    interpolated inverse, outside it through the edge majorants
    D(r_edge) + r_edge * t, which are exact consequences of D's defining
    inequality and join the window branch continuously.

    The oracle evaluates D through the chordal (convexity-certified upper)
    interpolant: at r = Phi^{-1}(t) the value 2 D(r) equals the support
    bound D(r) + r t with D(r) never below the true distance function, so
    the variational inequality built from this phi can only be violated by
    the inner-solve gaps, not by interpolation error. (The log-log
    interpolant under-cuts the convex D between nodes and would show up as
    spurious source-condition violations at the tight witnesses.)
    """
    t_lo, t_hi = profile.phi_window()
    r_hi = profile.positive_r_max
    d_hi = profile.d_at(r_hi)       # smallest positive node value
    r_lo = profile.r_min
    d_lo = profile.d_at(r_lo)

    def oracle(t):
        if t < t_lo:
            return d_hi + r_hi * t
        if t > t_hi:
            return d_lo + r_lo * t
        return 2.0 * profile.d_at(profile.invert_phi(t, chord=True), chord=True)

    return IndexFunction(oracle=oracle, provenance="fromDistanceProfile",
                         window=(t_lo, t_hi))


def choose_alpha(delta: float, p: float, phi: IndexFunction,
                 c1: float = 1.0, c2: float = 1.0) -> float:
    """A priori regularization parameter: the geometric midpoint
    sqrt(c1 c2) * delta^p / phi(delta) of the admissible band
    [c1, c2] * delta^p / phi(delta)."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if not 0 < c1 <= c2:
        raise ValueError(f"need 0 < c1 <= c2, got c1={c1}, c2={c2}")
    phi_delta = phi(delta)
    if phi_delta <= 0:
        raise ValueError(f"phi(delta)={phi_delta} must be positive")
    return float(np.sqrt(c1 * c2) * delta ** p / phi_delta)


@dataclass
class VscReport:
    """Outcome of an adversarial source-condition check."""

    minimum_gap: float
    witness: np.ndarray
    passed: bool
    evaluations: int


def check_vsc(problem: ProblemSpec, exact: ExactSolution, phi: IndexFunction,
              tol: float = 1e-6, profile: DistanceProfile | None = None) -> VscReport:
    """Adversarially probe 0 <= Omega(x) - Omega(x+) + phi(||A(x - x+)||_Y).

    Minimizes the gap over a deterministic probe set (the exact solution,
    the origin, coordinate and fixed-seed random perturbations at several
    scales, and the inner-problem minimizers stored in a profile, which
    are the natural near-tight witnesses), followed by a coordinate
    pattern-search polish. PASS means the smallest value found is >= -tol;
    a FAIL report (with witness) is a valid outcome, not an error.
    """
    A = problem.A
    omega = problem.penalty.value
    omega_dagger = exact.penalty_value
    b = A @ exact.x

    def gap(x):
        return omega(x) - omega_dagger + phi(problem.y_space.norm(A @ x - b))

    evals = 0
    best_gap, best_x = np.inf, exact.x.copy()

    def consider(x):
        nonlocal evals, best_gap, best_x
        g = gap(x)
        evals += 1
        if g < best_gap:
            best_gap, best_x = g, np.asarray(x, dtype=float).copy()

    consider(exact.x)
    consider(np.zeros(problem.x_dim))
    if profile is not None:
        for w in profile.witnesses:
            consider(w)
    scale0 = max(1.0, float(np.linalg.norm(exact.x)))
    for d in probe_directions(problem.x_dim):
        for s in (1e-3, 1e-2, 1e-1, 1.0, 10.0):
            consider(exact.x + s * scale0 * d)

    # coordinate pattern search from the best probe
    x = best_x.copy()
    step = 0.5 * scale0
    eye = np.eye(problem.x_dim)
    while step > 1e-9 * scale0:
        improved = False
        for i in range(problem.x_dim):
            for sgn in (1.0, -1.0):
                cand = x + sgn * step * eye[i]
                g = gap(cand)
                evals += 1
                if g < best_gap:
                    best_gap, best_x = g, cand
                    x = cand
                    improved = True
        if not improved:
            step *= 0.5
    return VscReport(minimum_gap=float(best_gap), witness=best_x,
                     passed=bool(best_gap >= -tol), evaluations=evals)
