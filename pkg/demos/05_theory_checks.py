"""
Numerics behind the recovery guarantees
=======================================

The selection guarantees lean on a handful of computable quantities: sparse
eigenvalue bounds of the design, a two-sided bound sandwiching every forward
gain, and an error that should shrink like 1/sqrt(n).  Each is checked here
on data small enough to verify by brute force.
"""

import numpy as np

from groupsel.criterion import make_dataset, make_objective
from groupsel.groups import validate_partition
from groupsel.rng import child_rng
from groupsel.verify import (
    gain_sandwich_check,
    gradient_check,
    phi_bounds,
    scaling_experiment,
)

rng = child_rng(0, 42)
part = validate_partition([[0, 1], [2, 3], [4, 5], [6, 7]], p=8)
X = rng.standard_normal((40, 8))
obj = make_objective("gaussian", make_dataset(X, rng.standard_normal(40)))

# extreme sparse eigenvalues over all group subsets of size <= t, by exact
# enumeration; their ratio is the conditioning the guarantees depend on
for t in (1, 2, 3):
    rep = phi_bounds(obj, part, t)
    print(f"t={t}:  phi- = {rep.phi_minus:.4f}  phi+ = {rep.phi_plus:.4f}"
          f"  kappa = {rep.kappa:.2f}")

# every forward gain must land between ||grad||^2/(2 rho+) and /(2 rho-)
sw = gain_sandwich_check(obj, part, trials=200, seed=0)
print(f"\ngain sandwich: {sw.passed}/{sw.trials} trials inside the bounds")

# analytic gradients against central finite differences, both families
for family in ("gaussian", "logistic"):
    y = np.sign(rng.standard_normal(40)) if family == "logistic" else rng.standard_normal(40)
    fam_obj = make_objective(family, make_dataset(X, y))
    worst = gradient_check(fam_obj, trials=50, seed=3)
    print(f"{family:9s} gradient check, worst relative error: {worst:.2e}")

# estimation error vs sample size: log(error^2) against log(n) should have
# slope near -1.  Trimmed grid here; the release gate runs up to n=1600.
rep = scaling_experiment("gaussian", n_grid=(100, 200, 400), replications=3, kbar=3)
print("\nn       mean squared error   exact recovery")
for n, mse, rate in zip(rep.n_grid, rep.mean_squared_error, rep.recovery_rate):
    print(f"{n:5d}   {mse:18.4f}   {rate:14.2f}")
print("fitted slope:", round(rep.slope, 3))
