"""Finite-dimensional weighted q-norm spaces, dual norms, and the duality map.

A measurement space is a weighted q-norm on R^m,

    ||v|| = (sum_i w_i |v_i|^q)^(1/q),    1 < q < inf,  w_i > 0.

Strict smoothness (q > 1) makes the subdifferential of the fitting
functional (1/p)||.||^p a singleton away from the origin, so the dual
certificate of a Tikhonov minimizer is uniquely determined and computable.
Vectors are plain numpy arrays; a `NormSpec` carries the geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DimensionMismatchError(ValueError):
    """Vector length does not match the weight vector of its space."""


@dataclass(frozen=True)
class NormSpec:
    """Weighted q-norm on R^n with exponent q in (1, inf) and positive weights.

    Parameters
    ----------
    q : float
        Norm exponent, strictly greater than 1 (smoothness off the origin).
    weights : array_like of shape (n,)
        Strictly positive coordinate weights.
    """

    q: float
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if not np.isfinite(self.q) or self.q <= 1.0:
            raise ValueError(f"norm exponent q must satisfy 1 < q < inf, got {self.q}")
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d vector")
        if not np.all(w > 0):
            raise ValueError("all weights must be strictly positive")
        object.__setattr__(self, "_dual_cache", None)

    @classmethod
    def euclidean(cls, dim: int) -> "NormSpec":
        return cls(q=2.0, weights=np.ones(dim))

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def dual_exponent(self) -> float:
        """Hoelder conjugate q* with 1/q + 1/q* = 1."""
        return self.q / (self.q - 1.0)

    def dual(self) -> "NormSpec":
        """The dual space: exponent q*, weights w^(1 - q*)."""
        if self._dual_cache is None:
            qs = self.dual_exponent
            object.__setattr__(self, "_dual_cache",
                               NormSpec(q=qs, weights=self.weights ** (1.0 - qs)))
        return self._dual_cache

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatchError(
                f"vector of shape {v.shape} in space of dimension {self.dim}"
            )
        return v

    def norm(self, v) -> float:
        """(sum_i w_i |v_i|^q)^(1/q); zero exactly for v = 0."""
        v = self._check(v)
        if self.q == 2.0:
            return float(np.sqrt(np.sum(self.weights * v * v)))
        return float(np.sum(self.weights * np.abs(v) ** self.q) ** (1.0 / self.q))

    def dual_norm(self, eta) -> float:
        """Exact dual norm: the weighted q*-norm with reciprocal-adjusted weights."""
        return self.dual().norm(eta)

    def fitting_gradient(self, y, p: float) -> np.ndarray:
        """Gradient of (1/p)||.||^p at y, the duality-map element.

        Returns the unique eta with <eta, y> = ||eta||_* ||y|| and
        ||eta||_* = ||y||^(p-1); for y = 0 the singleton {0}.
        Closed form: ||y||^(p-q) * w_i |y_i|^(q-1) sign(y_i).
        """
        if p <= 1.0:
            raise ValueError(f"fitting exponent p must exceed 1, got {p}")
        y = self._check(y)
        ny = self.norm(y)
        if ny == 0.0:
            return np.zeros(self.dim)
        return ny ** (p - self.q) * self.weights * np.abs(y) ** (self.q - 1.0) * np.sign(y)

    def unit_vector(self, v) -> np.ndarray:
        """v rescaled to norm exactly 1."""
        v = self._check(v)
        nv = self.norm(v)
        if nv == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return v / nv

    def project_dual_ball(self, v, radius: float) -> np.ndarray:
        """Euclidean projection of v onto {z : dual_norm(z) <= radius}.

        Used as the dual prox in the primal-dual engines. radius = 0 maps
        everything to 0. For the weighted-2 case the multiplier equation is
        solved by 1-d bisection; general exponents use a nested bisection
        (outer on the multiplier, inner per coordinate). Deterministic.
        """
        v = self._check(np.asarray(v, dtype=float))
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        if radius == 0.0:
            return np.zeros(self.dim)
        dual_space = self.dual()
        u = dual_space.q
        c = dual_space.weights
        if u == 2.0 and c.size and np.all(c == c[0]):
            # uniform weighted-2 ball is a Euclidean ball: radial scaling
            nv = float(np.sqrt(c[0])) * float(np.linalg.norm(v))
            if nv <= radius:
                return v.copy()
            return v * (radius / nv)
        if dual_space.norm(v) <= radius:
            return v.copy()
        if u == 2.0:
            return _project_weighted_l2(v, c, radius)
        return _project_weighted_lu(v, c, u, radius)


def _project_weighted_l2(v: np.ndarray, c: np.ndarray, radius: float) -> np.ndarray:
    # minimize 1/2||z-v||^2 s.t. sum c_i z_i^2 <= r^2; z_i = v_i/(1+2*lam*c_i)
    target = radius * radius

    def constraint(lam):
        return float(np.sum(c * (v / (1.0 + 2.0 * lam * c)) ** 2))

    lo, hi = 0.0, 1.0
    while constraint(hi) > target:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("ball projection multiplier search diverged")
    lam = hi
    for _ in range(80):
        # Newton step on the monotone constraint, bisection safeguarded
        g = constraint(lam) - target
        if g > 0:
            lo = lam
        else:
            hi = lam
        dg = float(np.sum(-4.0 * c * c * v * v / (1.0 + 2.0 * lam * c) ** 3))
        step = lam - g / dg if dg != 0.0 else 0.5 * (lo + hi)
        lam_new = step if lo < step < hi else 0.5 * (lo + hi)
        if lam_new == lam:
            break
        lam = lam_new
    return v / (1.0 + 2.0 * lam * c)


def _project_weighted_lu(v: np.ndarray, c: np.ndarray, u: float, radius: float) -> np.ndarray:
    # KKT: t_i + lam*u*c_i*t_i^(u-1) = |v_i|, t_i >= 0, sum c_i t_i^u = r^u
    av = np.abs(v)
    target = radius ** u

    def coords(lam):
        t = np.empty_like(av)
        for i, vi in enumerate(av):
            if vi == 0.0:
                t[i] = 0.0
                continue
            lo_i, hi_i = 0.0, vi
            for _ in range(100):
                mid = 0.5 * (lo_i + hi_i)
                if mid + lam * u * c[i] * mid ** (u - 1.0) > vi:
                    hi_i = mid
                else:
                    lo_i = mid
            t[i] = 0.5 * (lo_i + hi_i)
        return t

    def constraint(lam):
        return float(np.sum(c * coords(lam) ** u))

    lo, hi = 0.0, 1.0
    while constraint(hi) > target:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("ball projection multiplier search diverged")
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if constraint(mid) > target:
            lo = mid
        else:
            hi = mid
    return coords(0.5 * (lo + hi)) * np.sign(v)
