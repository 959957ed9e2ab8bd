"""Weighted q-norms, their duals, and the duality map of the fitting term.

The data-fit functional (1/p)||.||^p is differentiable whenever the norm is
a weighted q-norm with q > 1; its gradient at y is the unique dual element
eta with <eta, y> = ||eta||_* ||y|| and ||eta||_* = ||y||^(p-1). This script
evaluates those identities on a few concrete vectors.
"""

import numpy as np

from bregrates import NormSpec

euclid = NormSpec.euclidean(2)
print("Euclidean norm of (3, 4):", euclid.norm([3.0, 4.0]))

sp = NormSpec(q=3.0, weights=np.array([1.0, 1.0]))
print("\nq = 3 norm of (1, 1):      ", sp.norm([1.0, 1.0]), " (= 2^(1/3))")
print("dual (q* = 3/2) of (1, 1): ", sp.dual_norm([1.0, 1.0]), " (= 2^(2/3))")

# Hoelder pairing is tight exactly at the duality-map image
rng = np.random.default_rng(1)
y = rng.standard_normal(2)
eta = sp.fitting_gradient(y, p=2.5)
print("\nrandom y:", y)
print("duality map eta = grad (1/p)||.||^p (y):", eta)
print("<eta, y>            =", float(eta @ y))
print("||eta||_* * ||y||   =", sp.dual_norm(eta) * sp.norm(y))
print("||eta||_*           =", sp.dual_norm(eta))
print("||y||^(p-1)         =", sp.norm(y) ** 1.5)

# the same object via central finite differences
h = 1e-6
fd = np.array([
    (sp.norm(y + h * e) ** 2.5 / 2.5 - sp.norm(y - h * e) ** 2.5 / 2.5) / (2 * h)
    for e in np.eye(2)
])
print("\nfinite-difference gradient:", fd)
print("max deviation:", float(np.max(np.abs(fd - eta))))
