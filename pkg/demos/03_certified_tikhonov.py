"""One certified Tikhonov solve, and what makes its output trustworthy.

A minimizer of (1/p)||Ax - y||^p + alpha Omega(x) is characterized by a
dual element: eta = -(1/alpha) * duality-map(Ax - y) must satisfy
||eta||_* = residual^(p-1)/alpha and A^T eta must be a subgradient of the
penalty at the minimizer. Both are verified on every accepted solution, so
"solved" is an assertable predicate rather than a hope.
"""

import numpy as np

from bregrates import make_noise, omega_min_solution, problems, skewed_bregman, solve_tikhonov
from bregrates.penalties import subgradient_check

cfg = problems.load("diag8")
prob = cfg.problem
print("operator: diagonal, singular values", np.diag(prob.A))

exact = omega_min_solution(prob)
print("penalty-minimal solution:", np.round(exact.x, 8),
      f"(feasibility {exact.feasibility_residual:.1e})")

delta = 1e-2
y_noisy = make_noise(prob, delta, "randomUnit", seed=7)
sol = solve_tikhonov(prob, y_noisy, alpha=1e-4)

print(f"\nnoise level delta = {delta}, alpha = {sol.alpha}")
print("x_alpha          =", np.round(sol.x, 6))
print("residual norm    =", sol.residual_norm)
print("certificate      =", f"{sol.optimality_gap:.2e}  (prox fixed-point residual)")

dual_norm = prob.y_space.dual_norm(sol.eta)
print("\ndual-norm identity: ||eta||_* =", dual_norm)
print("residual^(p-1)/alpha          =", sol.residual_norm ** (prob.p - 1) / sol.alpha)

ok, violation = subgradient_check(prob.penalty, sol.x, sol.xi, tol=1e-6)
print(f"A^T eta in dOmega(x_alpha): {ok} (violation {violation:.2e})")

b = skewed_bregman(sol, exact, prob.penalty)
print(f"\nskewed Bregman distance B(x+, x_alpha) = {b:.8f}")
print("quadratic case check 1/2||x+ - x_alpha||^2 =",
      0.5 * float(np.sum((exact.x - sol.x) ** 2)))
