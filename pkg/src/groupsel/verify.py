"""Numerical verification of the regularity quantities behind the theory.

For quadratic objectives the second-order remainder is exactly the restricted
Gram quadratic form, so the restricted eigenvalue extremes rho(+/-), their
subset-enumerated envelopes phi(+/-)(t) and condition number kappa(t), the
logistic curvature quantities U1-U3 at the truth, and the forward-gain
sandwich are all directly computable and checkable against brute force.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .criterion import Objective, forward_gain, sigmoid
from .errors import CombinatorialBudgetError, FamilyError, RangeError, SingularError
from .groups import GroupPartition, GroupSet, feature_set
from .rng import child_rng
from .simulate import SimInstance

_ENUMERATION_BUDGET = 10**6


@dataclass(frozen=True)
class RegularityReport:
    """Restricted eigenvalue envelopes over group subsets of size <= t."""

    t: int
    phi_minus: float
    phi_plus: float
    kappa: float
    argmin_set: GroupSet
    argmax_set: GroupSet
    exact: bool


@dataclass(frozen=True)
class LogisticRegularity:
    """Spectral-norm curvature quantities at the truth."""

    U1: float
    U2: float
    U3: float


def _require_gaussian(obj: Objective) -> None:
    if obj.family != "gaussian":
        raise FamilyError(
            "restricted eigenvalue extremes are exact only for the quadratic family"
        )


def rho_bounds(obj: Objective, partition: GroupPartition, S) -> tuple[float, float]:
    """Extreme eigenvalues of the restricted Gram (1/n) X_S' X_S."""
    _require_gaussian(obj)
    idx = feature_set(partition, S)
    if idx.size == 0:
        raise RangeError("S must be nonempty")
    X_s = obj.X[:, idx]
    eigs = np.linalg.eigvalsh(X_s.T @ X_s / obj.n)
    return float(eigs[0]), float(eigs[-1])


def phi_bounds(obj: Objective, partition: GroupPartition, t: int) -> RegularityReport:
    """Exact inf/sup of rho-(F_S)/rho+(F_S) over nonempty S with |S| <= t.

    Enumerates every subset; refuses when the subset count exceeds 10^6.
    """
    _require_gaussian(obj)
    m = partition.m
    if not 1 <= t <= m:
        raise RangeError(f"t must be in [1, {m}], got {t}")
    total = sum(comb(m, s) for s in range(1, t + 1))
    if total > _ENUMERATION_BUDGET:
        raise CombinatorialBudgetError(
            f"{total} subsets exceed the {_ENUMERATION_BUDGET} enumeration budget"
        )
    phi_minus, phi_plus = np.inf, -np.inf
    argmin_set = argmax_set = GroupSet()
    for s in range(1, t + 1):
        for S in combinations(range(m), s):
            lo, hi = rho_bounds(obj, partition, S)
            if lo < phi_minus:
                phi_minus, argmin_set = lo, GroupSet(S)
            if hi > phi_plus:
                phi_plus, argmax_set = hi, GroupSet(S)
    kappa = phi_plus / phi_minus if phi_minus > 0 else np.inf
    return RegularityReport(
        t=t, phi_minus=float(phi_minus), phi_plus=float(phi_plus), kappa=float(kappa),
        argmin_set=argmin_set, argmax_set=argmax_set, exact=True,
    )


def logistic_regularity(instance: SimInstance) -> LogisticRegularity:
    """U1 = ||Gram of the relevant block||, U2 = ||(weighted Gram)^-1||,
    U3 = max over irrelevant groups of the cross weighted-Gram norm.

    Weights are p_i (1 - p_i) evaluated at the truth.
    """
    ds = instance.dataset
    idx_rel = feature_set(instance.partition, instance.relevant)
    X_rel = ds.X[:, idx_rel]
    n = ds.n
    z = ds.X @ instance.truth
    v = sigmoid(z) * sigmoid(-z)
    U1 = float(np.linalg.norm(X_rel.T @ X_rel / n, 2))
    weighted = X_rel.T @ (X_rel * v[:, None]) / n
    try:
        inv = np.linalg.inv(weighted)
    except np.linalg.LinAlgError as exc:
        raise SingularError("weighted relevant-block Gram is singular") from exc
    U2 = float(np.linalg.norm(inv, 2))
    U3 = 0.0
    for g in range(instance.partition.m):
        if g in instance.relevant:
            continue
        X_g = ds.X[:, instance.partition.groups[g]]
        U3 = max(U3, float(np.linalg.norm(X_g.T @ (X_rel * v[:, None]) / n, 2)))
    return LogisticRegularity(U1=U1, U2=U2, U3=U3)


@dataclass(frozen=True)
class SandwichReport:
    trials: int
    passed: int
    max_relative_violation: float

    @property
    def all_passed(self) -> bool:
        return self.passed == self.trials


def gain_sandwich_check(
    obj: Objective, partition: GroupPartition, trials: int = 100, seed: int = 0
) -> SandwichReport:
    """Check gain in [||grad_g||^2/(2 rho+), ||grad_g||^2/(2 rho-)] on random points.

    The upper bound is skipped for groups with rho- = 0 (it is infinite).
    Relative slack 1e-9.
    """
    _require_gaussian(obj)
    rng = child_rng(seed, 99)
    passed = 0
    worst = 0.0
    for trial in range(trials):
        w = rng.standard_normal(obj.p)
        g = int(rng.integers(partition.m))
        gain = forward_gain(obj, w, g, partition)
        grad = obj.gradient(w)
        gnorm2 = float(np.sum(grad[partition.groups[g]] ** 2))
        lo_eig, hi_eig = rho_bounds(obj, partition, [g])
        lower = gnorm2 / (2.0 * hi_eig) if hi_eig > 0 else 0.0
        upper = gnorm2 / (2.0 * lo_eig) if lo_eig > 0 else np.inf
        slack = 1e-9 * max(1.0, gain, lower)
        ok = gain >= lower - slack and gain <= upper + slack
        if ok:
            passed += 1
        else:
            rel = max(lower - gain, gain - upper) / max(lower, 1e-300)
            worst = max(worst, float(rel))
    return SandwichReport(trials=trials, passed=passed, max_relative_violation=worst)


def gradient_check(
    obj: Objective, trials: int = 50, seed: int = 0, step: float = 1e-5
) -> float:
    """Worst relative error of central finite differences against the gradient."""
    rng = child_rng(seed, 98)
    worst = 0.0
    for _ in range(trials):
        w = rng.standard_normal(obj.p)
        j = int(rng.integers(obj.p))
        e = np.zeros(obj.p)
        e[j] = step
        fd = (obj.value(w + e) - obj.value(w - e)) / (2.0 * step)
        an = obj.gradient(w)[j]
        denom = max(abs(an), abs(fd), 1e-8)
        worst = max(worst, abs(fd - an) / denom)
    return worst


@dataclass(frozen=True)
class ScalingReport:
    """Error-vs-n decay and exact-recovery rates of the full pipeline."""

    n_grid: tuple[int, ...]
    mean_squared_error: tuple[float, ...]
    recovery_rate: tuple[float, ...]
    slope: float


def scaling_experiment(
    family: str,
    n_grid: tuple[int, ...] = (200, 400, 800, 1600),
    replications: int = 10,
    seed: int = 0,
    kbar: int = 5,
    beta: float = 1.0,
    jobs: int = 1,
) -> ScalingReport:
    """Fit the cross-validated greedy path across sample sizes.

    Returns the least-squares slope of log(mean error^2) against log n and
    the empirical exact-recovery probability per sample size.
    """
    from .bench import run_replications

    case = "case2" if family == "logistic" else "case1"
    mses = []
    rates = []
    for n in n_grid:
        reports = run_replications(
            case, n, kbar=kbar, beta=beta, seed=seed,
            reps=replications, methods=("iga",), jobs=jobs,
        )
        errs = np.array([r["iga"].l2_error for r in reports])
        exact = np.array(
            [
                r["iga"].correct_groups == kbar and r["iga"].incorrect_groups == 0
                for r in reports
            ]
        )
        mses.append(float(np.mean(errs**2)))
        rates.append(float(np.mean(exact)))
    slope = float(np.polyfit(np.log(np.asarray(n_grid, float)), np.log(mses), 1)[0])
    return ScalingReport(
        n_grid=tuple(int(n) for n in n_grid),
        mean_squared_error=tuple(mses),
        recovery_rate=tuple(rates),
        slope=slope,
    )
