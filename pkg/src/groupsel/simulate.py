"""Seeded generators for the benchmark simulation designs.

Case 1: gaussian linear model with AR(1)-correlated features, m equal groups,
relevant groups at the odd positions {1, 3, ..., 2*kbar-1} (one-based), and
coefficients drawn uniformly from [-beta, beta] on the relevant groups.
Case 2: the same design and truth with logistic labels in {-1, +1}.
The heuristic design is the tiny five-group decoy construction where group 3
is a noisy sum of the two true groups.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criterion import Dataset, make_dataset, sigmoid
from .errors import RangeError
from .groups import GroupPartition, GroupSet, validate_partition
from .rng import (
    STREAM_COEFFICIENTS,
    STREAM_DESIGN,
    STREAM_NOISE,
    STREAM_PRIORITY,
    child_rng,
)

CASES = ("case1", "case2", "heuristic")


@dataclass(frozen=True)
class SimSpec:
    """Scenario parameters; defaults follow the benchmark protocol."""

    case: str
    n: int
    kbar: int = 5
    beta: float = 1.0
    p: int = 1000
    m: int = 200
    q: int = 5
    rho: float = 0.5
    noise_variance: float = 2.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.case not in CASES:
            raise RangeError(f"case must be one of {CASES}")
        if self.case != "heuristic":
            if self.p != self.m * self.q:
                raise RangeError(f"p={self.p} must equal m*q={self.m * self.q}")
            if not 1 <= self.kbar <= self.m // 2:
                raise RangeError(
                    f"kbar={self.kbar} must fit the odd slots: 1 <= kbar <= m/2={self.m // 2}"
                )
        if not abs(self.rho) < 1:
            raise RangeError(f"|rho| must be < 1, got {self.rho}")
        if self.n < 1 or self.noise_variance < 0:
            raise RangeError("n must be positive and noise_variance nonnegative")


@dataclass(frozen=True, eq=False)
class SimInstance:
    """One generated dataset with its partition and ground truth."""

    dataset: Dataset
    partition: GroupPartition
    truth: np.ndarray
    relevant: GroupSet
    spec: SimSpec


def ar1_cholesky(p: int, rho: float) -> np.ndarray:
    """Lower Cholesky factor of the AR(1) covariance Sigma_ij = rho^|i-j|.

    Closed form: first column rho^i, then L[i, j] = rho^(i-j) sqrt(1-rho^2)
    for 1 <= j <= i.
    """
    if not abs(rho) < 1:
        raise RangeError(f"|rho| must be < 1, got {rho}")
    if p < 1:
        raise RangeError(f"p must be positive, got {p}")
    i = np.arange(p)
    diff = i[:, None] - i[None, :]
    L = np.where(diff >= 0, float(rho) ** np.maximum(diff, 0), 0.0)
    L[:, 1:] *= np.sqrt(1.0 - rho * rho)
    return L


def _contiguous_partition(m: int, q: int) -> GroupPartition:
    return validate_partition([list(range(g * q, (g + 1) * q)) for g in range(m)], m * q)


def relevant_groups(kbar: int) -> GroupSet:
    """Zero-based relevant set {0, 2, ..., 2*kbar-2} (odd positions one-based)."""
    return GroupSet(range(0, 2 * kbar, 2))


def _truth_vector(spec: SimSpec, partition: GroupPartition, relevant: GroupSet) -> np.ndarray:
    rng = child_rng(spec.seed, STREAM_COEFFICIENTS)
    w = np.zeros(spec.p)
    for g in sorted(relevant):
        idx = partition.groups[g]
        draw = rng.uniform(-spec.beta, spec.beta, size=idx.size)
        while spec.beta > 0 and not np.any(draw):  # measure-zero all-zero draw
            draw = rng.uniform(-spec.beta, spec.beta, size=idx.size)
        w[idx] = draw
    return w


def _design_matrix(spec: SimSpec) -> np.ndarray:
    rng = child_rng(spec.seed, STREAM_DESIGN)
    Z = rng.standard_normal((spec.n, spec.p))
    if spec.rho == 0.0:
        return Z
    return Z @ ar1_cholesky(spec.p, spec.rho).T


def gen_case1(spec: SimSpec) -> SimInstance:
    """Gaussian response y = x' w* + eps with eps ~ N(0, noise_variance)."""
    if spec.case != "case1":
        raise RangeError(f"spec.case must be 'case1', got {spec.case!r}")
    partition = _contiguous_partition(spec.m, spec.q)
    rel = relevant_groups(spec.kbar)
    w_star = _truth_vector(spec, partition, rel)
    X = _design_matrix(spec)
    eps = child_rng(spec.seed, STREAM_NOISE).normal(
        0.0, np.sqrt(spec.noise_variance), size=spec.n
    )
    y = X @ w_star + eps
    return SimInstance(
        dataset=make_dataset(X, y), partition=partition, truth=w_star,
        relevant=rel, spec=spec,
    )


def gen_case2(spec: SimSpec) -> SimInstance:
    """Logistic labels in {-1, +1} with Pr(y = 1 | x) = sigmoid(x' w*)."""
    if spec.case != "case2":
        raise RangeError(f"spec.case must be 'case2', got {spec.case!r}")
    partition = _contiguous_partition(spec.m, spec.q)
    rel = relevant_groups(spec.kbar)
    w_star = _truth_vector(spec, partition, rel)
    X = _design_matrix(spec)
    u = child_rng(spec.seed, STREAM_NOISE).uniform(size=spec.n)
    y = np.where(u < sigmoid(X @ w_star), 1.0, -1.0)
    return SimInstance(
        dataset=make_dataset(X, y), partition=partition, truth=w_star,
        relevant=rel, spec=spec,
    )


def gen_heuristic(n: int, seed: int) -> SimInstance:
    """The five-group decoy design.

    Groups 1, 2, 4, 5 are standard normal pairs; each feature of group 3 is
    the sum of one true group's pair plus N(0, 0.5) noise.  The response is
    the sum of the four true features plus N(0, 1), so the truth is groups
    {1, 2} with unit coefficients, while group 3 alone mimics both.
    """
    if n < 10:
        raise RangeError(f"need n >= 10, got {n}")
    spec = SimSpec(case="heuristic", n=n, kbar=2, beta=1.0, p=10, m=5, q=2,
                   rho=0.0, noise_variance=1.0, seed=seed)
    partition = _contiguous_partition(5, 2)
    rng_x = child_rng(seed, STREAM_DESIGN)
    rng_e = child_rng(seed, STREAM_NOISE)
    X = rng_x.standard_normal((n, 10))
    X[:, 4] = X[:, 0] + X[:, 1] + rng_x.normal(0.0, np.sqrt(0.5), size=n)
    X[:, 5] = X[:, 2] + X[:, 3] + rng_x.normal(0.0, np.sqrt(0.5), size=n)
    w_star = np.zeros(10)
    w_star[:4] = 1.0
    y = X @ w_star + rng_e.standard_normal(n)
    return SimInstance(
        dataset=make_dataset(X, y), partition=partition, truth=w_star,
        relevant=GroupSet((0, 1)), spec=spec,
    )


def generate(spec: SimSpec) -> SimInstance:
    """Dispatch on ``spec.case``."""
    if spec.case == "case1":
        return gen_case1(spec)
    if spec.case == "case2":
        return gen_case2(spec)
    return gen_heuristic(spec.n, spec.seed)


def make_priority_list(instance: SimInstance, seed: int) -> GroupSet:
    """A mixed advice set: floor(3*kbar/5) relevant plus as many irrelevant groups."""
    kbar = len(instance.relevant)
    count = (3 * kbar) // 5
    if count < 1:
        raise RangeError(f"kbar={kbar} too small for a nonempty priority list")
    rng = child_rng(seed, STREAM_PRIORITY)
    rel = sorted(instance.relevant)
    irrel = sorted(set(range(instance.partition.m)) - instance.relevant)
    picked_rel = rng.choice(rel, size=count, replace=False)
    picked_irrel = rng.choice(irrel, size=count, replace=False)
    return GroupSet(int(g) for g in np.concatenate([picked_rel, picked_irrel]))
