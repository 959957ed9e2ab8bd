"""Convex penalty family: values, proximal maps, conjugates, membership tests.

Four kinds, each proper, convex, coercive, nonnegative, and minimal at 0:

    SquaredL2   1/2 sum w_i x_i^2
    PowerNorm   1/s sum w_i |x_i|^s,          s in (1, 2]
    L1          sum w_i |x_i|
    ElasticNet  sum w_i (|x_i| + mu/2 x_i^2), mu > 0

Every kind carries a prox oracle (the solver workhorse) and a Fenchel
conjugate; the strongly convex kinds also expose the conjugate gradient,
which unlocks the fast dual path of the primal-dual engine.
Subgradient membership is certified by probing the defining inequality
on a fixed deterministic probe set, never by symbolic calculus.
"""

from __future__ import annotations

import numpy as np

_PROBE_SCALES = (1e-4, 1e-2, 1e-1, 1.0)
_PROBE_SEED = 20240817
_N_RANDOM_DIRECTIONS = 16


class Penalty:
    """Base class; subclasses fill in per-kind formulas."""

    kind: str

    def __init__(self, weights=None, dim=None):
        if weights is None:
            if dim is None:
                raise ValueError("either weights or dim is required")
            weights = np.ones(int(dim))
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or not np.all(w > 0):
            raise ValueError("weights must be a 1-d strictly positive vector")
        self.weights = w

    @property
    def dim(self) -> int:
        return self.weights.size

    #: global minimum (attained at 0) for every implemented kind
    min_value = 0.0

    #: Euclidean strong-convexity modulus (0 when not strongly convex)
    strong_convexity = 0.0

    def value(self, x) -> float:
        raise NotImplementedError

    def prox(self, v, tau: float):
        """argmin_x 1/2||x - v||_2^2 + tau * Omega(x); unique by strong convexity."""
        raise NotImplementedError

    def conjugate(self, xi) -> float:
        """Omega*(xi) = sup_x <xi, x> - Omega(x); may be +inf."""
        raise NotImplementedError

    def conjugate_grad(self, xi):
        """grad Omega*(xi) when Omega* is differentiable, else None."""
        return None

    def grad_or_none(self, x):
        """The single-valued subgradient at x, or None where the
        subdifferential is not a singleton (used for optional xi at x+)."""
        return None

    def dual_feasible_scale(self, xi) -> float:
        """Largest m in (0, 1] with Omega*(m * xi) finite (1.0 when dom
        Omega* is everything); rescaling keeps dual values usable as
        certified lower bounds for kinds with constrained conjugates."""
        return 1.0

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"vector of shape {x.shape}, penalty of dimension {self.dim}")
        return x

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class SquaredL2(Penalty):
    kind = "SquaredL2"

    def __init__(self, weights=None, dim=None):
        super().__init__(weights, dim)
        self.strong_convexity = float(np.min(self.weights))

    def value(self, x):
        x = self._check(x)
        return float(0.5 * np.sum(self.weights * x * x))

    def prox(self, v, tau):
        v = self._check(v)
        return v / (1.0 + tau * self.weights)

    def conjugate(self, xi):
        xi = self._check(xi)
        return float(0.5 * np.sum(xi * xi / self.weights))

    def conjugate_grad(self, xi):
        return self._check(xi) / self.weights

    def grad_or_none(self, x):
        return self.weights * self._check(x)


class PowerNorm(Penalty):
    """1/s sum w_i |x_i|^s with s in (1, 2]."""

    kind = "PowerNorm"

    def __init__(self, s: float, weights=None, dim=None):
        super().__init__(weights, dim)
        if not 1.0 < s <= 2.0:
            raise ValueError(f"power-norm exponent s must lie in (1, 2], got {s}")
        self.s = float(s)
        if self.s == 2.0:
            self.strong_convexity = float(np.min(self.weights))

    def value(self, x):
        x = self._check(x)
        return float(np.sum(self.weights * np.abs(x) ** self.s) / self.s)

    def prox(self, v, tau):
        v = self._check(v)
        if self.s == 2.0:
            return v / (1.0 + tau * self.weights)
        # per coordinate: t + tau*w*t^(s-1) = |v|, t in [0, |v|], monotone
        out = np.zeros_like(v)
        for i, vi in enumerate(v):
            avi = abs(vi)
            if avi == 0.0:
                continue
            coef = tau * self.weights[i]
            lo, hi = 0.0, avi
            for _ in range(100):
                mid = 0.5 * (lo + hi)
                if mid + coef * mid ** (self.s - 1.0) > avi:
                    hi = mid
                else:
                    lo = mid
            out[i] = np.sign(vi) * 0.5 * (lo + hi)
        return out

    def conjugate(self, xi):
        xi = self._check(xi)
        ss = self.s / (self.s - 1.0)
        return float(np.sum(self.weights ** (1.0 - ss) * np.abs(xi) ** ss) / ss)

    def conjugate_grad(self, xi):
        xi = self._check(xi)
        ss = self.s / (self.s - 1.0)
        return np.sign(xi) * (np.abs(xi) / self.weights) ** (ss - 1.0)

    def grad_or_none(self, x):
        x = self._check(x)
        return self.weights * np.abs(x) ** (self.s - 1.0) * np.sign(x)


class L1(Penalty):
    kind = "L1"

    def value(self, x):
        return float(np.sum(self.weights * np.abs(self._check(x))))

    def prox(self, v, tau):
        v = self._check(v)
        return np.sign(v) * np.maximum(np.abs(v) - tau * self.weights, 0.0)

    def conjugate(self, xi):
        xi = self._check(xi)
        return 0.0 if np.all(np.abs(xi) <= self.weights) else np.inf

    def dual_feasible_scale(self, xi):
        xi = self._check(xi)
        a = np.abs(xi)
        mask = a > self.weights
        if not np.any(mask):
            return 1.0
        return float(np.min(self.weights[mask] / a[mask]))

    def grad_or_none(self, x):
        x = self._check(x)
        if np.any(x == 0.0):
            return None
        return self.weights * np.sign(x)


class ElasticNet(Penalty):
    """sum w_i (|x_i| + mu/2 x_i^2), mu > 0."""

    kind = "ElasticNet"

    def __init__(self, mu: float, weights=None, dim=None):
        super().__init__(weights, dim)
        if mu <= 0:
            raise ValueError(f"elastic-net mu must be positive, got {mu}")
        self.mu = float(mu)
        self.strong_convexity = self.mu * float(np.min(self.weights))

    def value(self, x):
        x = self._check(x)
        return float(np.sum(self.weights * (np.abs(x) + 0.5 * self.mu * x * x)))

    def prox(self, v, tau):
        v = self._check(v)
        tw = tau * self.weights
        return np.sign(v) * np.maximum(np.abs(v) - tw, 0.0) / (1.0 + tw * self.mu)

    def conjugate(self, xi):
        xi = self._check(xi)
        excess = np.maximum(np.abs(xi) - self.weights, 0.0)
        return float(np.sum(excess * excess / (2.0 * self.mu * self.weights)))

    def conjugate_grad(self, xi):
        xi = self._check(xi)
        return np.sign(xi) * np.maximum(np.abs(xi) - self.weights, 0.0) / (self.mu * self.weights)

    def grad_or_none(self, x):
        x = self._check(x)
        if np.any(x == 0.0):
            return None
        return self.weights * (np.sign(x) + self.mu * x)


_KINDS = {"SquaredL2": SquaredL2, "PowerNorm": PowerNorm, "L1": L1, "ElasticNet": ElasticNet}


def make_penalty(kind: str, dim: int, s: float | None = None, mu: float | None = None,
                 weights=None) -> Penalty:
    """Build a penalty from its serialized description."""
    if kind not in _KINDS:
        raise ValueError(f"unknown penalty kind {kind!r}; expected one of {sorted(_KINDS)}")
    if kind == "PowerNorm":
        if s is None:
            raise ValueError("PowerNorm requires the exponent s")
        return PowerNorm(s=s, weights=weights, dim=dim)
    if kind == "ElasticNet":
        if mu is None:
            raise ValueError("ElasticNet requires mu")
        return ElasticNet(mu=mu, weights=weights, dim=dim)
    if s is not None or mu is not None:
        raise ValueError(f"{kind} takes no extra parameters")
    return _KINDS[kind](weights=weights, dim=dim)


def probe_directions(dim: int) -> np.ndarray:
    """Deterministic probe directions: +-e_i plus fixed-seed random units."""
    dirs = []
    eye = np.eye(dim)
    for i in range(dim):
        dirs.append(eye[i])
        dirs.append(-eye[i])
    rng = np.random.default_rng(_PROBE_SEED)
    g = rng.standard_normal((_N_RANDOM_DIRECTIONS, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    dirs.extend(g)
    return np.array(dirs)


def subgradient_check(penalty: Penalty, x, xi, tol: float = 1e-8):
    """Probe the subgradient inequality Omega(z) >= Omega(x) + <xi, z-x>.

    z runs over coordinate perturbations of x at several scales plus
    fixed-seed random directions. Returns (ok, violation) where violation
    is the largest observed excess max(Omega(x) + <xi, z-x> - Omega(z));
    ok means violation <= tol.
    """
    x = penalty._check(x)
    xi = penalty._check(xi)
    fx = penalty.value(x)
    worst = 0.0
    for d in probe_directions(penalty.dim):
        for s in _PROBE_SCALES:
            z = x + s * d
            gap = fx + float(xi @ (z - x)) - penalty.value(z)
            if gap > worst:
                worst = gap
    return worst <= tol, worst
