"""The convex penalty family: values, proximal maps, subgradient probes.

Every penalty is nonnegative, convex, coercive, and minimal at the origin.
The prox oracle argmin_x 1/2||x - v||^2 + tau * Omega(x) is what all the
solvers consume; the subgradient probe certifies membership xi in dOmega(x)
by testing the defining inequality on a deterministic point cloud, which is
the same certificate the regularization machinery applies to its solutions.
"""

import numpy as np

from bregrates import ElasticNet, L1, PowerNorm, SquaredL2, subgradient_check

v = np.array([2.0, -0.5, 0.05])
tau = 1.0

for pen in (SquaredL2(dim=3), PowerNorm(s=1.5, dim=3), L1(dim=3),
            ElasticNet(mu=2.0, dim=3)):
    x_hat = pen.prox(v, tau)
    xi = (v - x_hat) / tau
    ok, violation = subgradient_check(pen, x_hat, xi, tol=1e-8)
    print(f"{pen.kind:11s} Omega(v) = {pen.value(v):8.4f}   prox(v) = "
          f"{np.array2string(x_hat, precision=4):28s} prox certificate "
          f"{'ok' if ok else 'VIOLATED'} ({violation:.1e})")

# the l1 subdifferential at a kink is the interval [-1, 1]
print("\nl1 at x = (0, 1): is (0.5, 1) a subgradient?",
      subgradient_check(L1(dim=2), [0.0, 1.0], [0.5, 1.0])[0])
ok, violation = subgradient_check(L1(dim=2), [0.0, 1.0], [2.0, 1.0])
print("is (2, 1) a subgradient?", ok, f"(worst violation {violation:.3f})")
