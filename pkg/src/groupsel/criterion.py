"""Smooth convex criterion functions with restricted minimization and forward gains.

The criterion is the averaged loss Q(w) = (1/n) sum_i f_i(x_i' w):

* gaussian:  Q(w) = ||y - Xw||^2 / (2n)
* logistic:  Q(w) = (1/n) sum_i log(1 + exp(-y_i x_i' w)),  y_i in {-1, +1}

Both families expose exact gradients, an exact-or-Newton restricted minimizer
over an arbitrary coordinate support, and the per-group forward gain
Q(w) - min_alpha Q(w + embed(g, alpha)) used by the greedy path engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, FamilyError, ZeroColumnError
from .groups import GroupPartition

FAMILIES = ("gaussian", "logistic")

# log(1 + exp(u)) switches to its asymptote u at this margin; exp(35) already
# overflows the addend's 53-bit mantissa, so the branch is exact in double.
_SOFTPLUS_BRANCH = 35.0

_LOGISTIC_GRAD_TOL = 1e-8
_GAUSSIAN_GRAD_TOL = 1e-10
_NEWTON_CAP = 100
_ARMIJO_C = 1e-4
_RIDGE_SCALE = 1e-8
_COEF_CAP = 30.0


def softplus(u: np.ndarray) -> np.ndarray:
    """Overflow-safe log(1 + exp(u))."""
    u = np.asarray(u, dtype=float)
    return np.where(u > _SOFTPLUS_BRANCH, u, np.log1p(np.exp(np.minimum(u, _SOFTPLUS_BRANCH))))


def sigmoid(u: np.ndarray) -> np.ndarray:
    """Overflow-safe 1 / (1 + exp(-u))."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    eu = np.exp(u[~pos])
    out[~pos] = eu / (1.0 + eu)
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design matrix, response, and the record of applied column rescaling.

    Attributes
    ----------
    X : ndarray, shape (n, p)
        Observations in rows.
    y : ndarray, shape (n,)
        Real responses (gaussian) or labels in {-1, +1} (logistic).
    column_scales : ndarray, shape (p,)
        Multipliers already applied to the raw columns; ones if untouched.
        A coefficient vector for this design maps back to raw coordinates as
        ``w_raw = column_scales * w``.
    """

    X: np.ndarray
    y: np.ndarray
    column_scales: np.ndarray

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


def make_dataset(X: np.ndarray, y: np.ndarray, column_scales: np.ndarray | None = None) -> Dataset:
    """Validate shapes and wrap arrays into a :class:`Dataset`."""
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DimensionError(f"X must be a nonempty 2-d matrix, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise DimensionError(f"y length {y.shape} does not match n={X.shape[0]}")
    if column_scales is None:
        column_scales = np.ones(X.shape[1])
    else:
        column_scales = np.asarray(column_scales, dtype=float).ravel()
        if column_scales.shape != (X.shape[1],):
            raise DimensionError("column_scales length must equal p")
    return Dataset(X=X, y=y, column_scales=column_scales)


def standardize(dataset: Dataset) -> Dataset:
    """Rescale every column to Euclidean norm sqrt(n), recording the scales.

    Raises
    ------
    ZeroColumnError
        If some column is identically zero.
    """
    norms = np.linalg.norm(dataset.X, axis=0)
    if np.any(norms == 0.0):
        raise ZeroColumnError(f"column {int(np.flatnonzero(norms == 0.0)[0])} is all zeros")
    s = np.sqrt(dataset.n) / norms
    return Dataset(
        X=dataset.X * s,
        y=dataset.y,
        column_scales=dataset.column_scales * s,
    )


@dataclass(frozen=True, eq=False)
class Objective:
    """A smooth convex criterion Q over a fixed dataset.

    Use :func:`make_objective`; the constructor trusts its inputs.
    """

    family: str
    dataset: Dataset

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def p(self) -> int:
        return self.dataset.p

    @property
    def X(self) -> np.ndarray:
        return self.dataset.X

    @property
    def y(self) -> np.ndarray:
        return self.dataset.y

    # Values and gradients are defined through the linear predictor z = Xw so
    # the path engine can maintain z incrementally.
    def value_from_linpred(self, z: np.ndarray) -> float:
        if self.family == "gaussian":
            r = self.y - z
            return float(r @ r) / (2.0 * self.n)
        return float(np.sum(softplus(-self.y * z))) / self.n

    def grad_pieces(self, z: np.ndarray) -> np.ndarray:
        """Per-observation gradient factors so that grad Q = X' pieces / n."""
        if self.family == "gaussian":
            return z - self.y
        return -self.y * sigmoid(-self.y * z)

    def hessian_weights(self, z: np.ndarray) -> np.ndarray:
        """Per-observation curvature weights (gaussian: ones; logistic: p(1-p))."""
        if self.family == "gaussian":
            return np.ones_like(z)
        return sigmoid(z) * sigmoid(-z)

    def value(self, w: np.ndarray) -> float:
        """Q(w)."""
        w = self._check(w)
        return self.value_from_linpred(self.X @ w)

    def gradient(self, w: np.ndarray) -> np.ndarray:
        """Exact analytic gradient of Q at w."""
        w = self._check(w)
        return self.X.T @ self.grad_pieces(self.X @ w) / self.n

    def _check(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float).ravel()
        if w.shape != (self.p,):
            raise DimensionError(f"expected length-{self.p} vector, got shape {w.shape}")
        return w


def make_objective(family: str, dataset: Dataset) -> Objective:
    """Validate family and (for logistic) labels, then build an Objective."""
    if family not in FAMILIES:
        raise FamilyError(f"family must be one of {FAMILIES}, got {family!r}")
    if family == "logistic" and not np.all(np.isin(dataset.y, (-1.0, 1.0))):
        raise DimensionError("logistic responses must take values in {-1, +1}")
    return Objective(family=family, dataset=dataset)


@dataclass(frozen=True)
class RestrictedSolveReport:
    """Result of minimizing Q over a fixed coordinate support.

    ``w`` is the full-length vector with off-support entries exactly zero.
    ``capped`` marks separable logistic fits whose coefficients hit the
    sup-norm cap; they count as successes with a flag, not failures.
    """

    w: np.ndarray
    support: np.ndarray
    iterations: int
    gradient_norm_on_support: float
    ridge_applied: bool
    converged: bool = True
    capped: bool = False

    @property
    def objective_value(self) -> float | None:
        return self._value

    _value: float | None = field(default=None, repr=False)


def _normalize_support(support: Sequence[int], p: int) -> np.ndarray:
    idx = np.asarray(list(support), dtype=np.intp)
    if idx.size == 0:
        return idx
    if np.any(idx < 0) or np.any(idx >= p):
        raise DimensionError(f"support indices must lie in [0, {p})")
    idx = np.unique(idx)
    return idx


def _gaussian_restricted(X_s: np.ndarray, y: np.ndarray, n: int) -> tuple[np.ndarray, bool, int, float]:
    """Least squares on the restricted column block via orthogonal factorization.

    Falls back to a ridged normal-equation solve on rank deficiency, then
    applies iterative refinement until the restricted gradient norm clears
    the gaussian tolerance (or stops improving).
    """
    w_s, _, rank, _ = scipy.linalg.lstsq(X_s, y, lapack_driver="gelsy")
    ridge_applied = rank < X_s.shape[1]
    if ridge_applied:
        gram = X_s.T @ X_s
        gram_r = gram + _RIDGE_SCALE * np.trace(gram) * np.eye(gram.shape[0])
        w_s = scipy.linalg.solve(gram_r, X_s.T @ y, assume_a="pos")
    iterations = 1
    for _ in range(3):
        gnorm = float(np.linalg.norm(X_s.T @ (X_s @ w_s - y) / n))
        if gnorm <= _GAUSSIAN_GRAD_TOL or ridge_applied:
            break
        dw, _, _, _ = scipy.linalg.lstsq(X_s, y - X_s @ w_s, lapack_driver="gelsy")
        w_s = w_s + dw
        iterations += 1
    gnorm = float(np.linalg.norm(X_s.T @ (X_s @ w_s - y) / n))
    return w_s, ridge_applied, iterations, gnorm


def _newton_minimize(
    obj: Objective,
    X_s: np.ndarray,
    w_s: np.ndarray,
    z_base: np.ndarray | None = None,
    grad_tol: float = _LOGISTIC_GRAD_TOL,
    max_iter: int = _NEWTON_CAP,
) -> tuple[np.ndarray, dict]:
    """Damped Newton with Armijo backtracking on the restricted logistic loss.

    ``z_base`` is a fixed offset added to the linear predictor (used for
    forward gains, where the rest of the model is held fixed).
    """
    n = obj.n
    y = obj.y
    z0 = np.zeros(n) if z_base is None else z_base
    z = z0 + X_s @ w_s
    info = {"iterations": 0, "ridge_applied": False, "converged": False, "capped": False}
    val = obj.value_from_linpred(z)
    # best point seen so far; the cap clip and a failed line search can both
    # move off the descent chain, and the caller is promised a point no worse
    # than the warm start
    best = (val, w_s, z)
    gnorm = np.inf
    for it in range(1, max_iter + 1):
        g = X_s.T @ obj.grad_pieces(z) / n
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            info["converged"] = True
            break
        v = obj.hessian_weights(z)
        H = X_s.T @ (X_s * v[:, None]) / n
        try:
            c, low = scipy.linalg.cho_factor(H)
        except scipy.linalg.LinAlgError:
            H = H + _RIDGE_SCALE * np.trace(H) * np.eye(H.shape[0])
            info["ridge_applied"] = True
            c, low = scipy.linalg.cho_factor(H)
        d = scipy.linalg.cho_solve((c, low), -g)
        dz = X_s @ d
        slope = float(g @ d)
        t = 1.0
        while t > 2.0**-50:
            val_t = obj.value_from_linpred(z + t * dz)
            if val_t <= val + _ARMIJO_C * t * slope:
                break
            t *= 0.5
        w_s = w_s + t * d
        z = z + t * dz
        val = val_t
        info["iterations"] = it
        if np.max(np.abs(w_s)) >= _COEF_CAP:
            # Separable data push coefficients off to infinity; freeze at the
            # cap and report success-with-flag.
            w_s = np.clip(w_s, -_COEF_CAP, _COEF_CAP)
            z = z0 + X_s @ w_s
            val = obj.value_from_linpred(z)
            info["capped"] = True
            info["converged"] = True
            if val <= best[0]:
                best = (val, w_s, z)
            break
        if val <= best[0]:
            best = (val, w_s.copy(), z.copy())
    val, w_s, z = best
    g = X_s.T @ obj.grad_pieces(z) / n
    info["gradient_norm"] = float(np.linalg.norm(g))
    info["value"] = val
    return w_s, info


def restricted_minimize(
    obj: Objective,
    support: Sequence[int],
    warm_start: np.ndarray | None = None,
) -> RestrictedSolveReport:
    """Minimize Q over vectors supported on the given coordinate set.

    Parameters
    ----------
    obj : Objective
    support : sequence of int
        Zero-based coordinate indices; duplicates are merged.
    warm_start : ndarray, optional
        Full-length vector whose support entries seed the iterative solver
        (logistic only; the gaussian solve is direct).

    Returns
    -------
    RestrictedSolveReport
        Off-support entries of the solution are exactly zero.
    """
    idx = _normalize_support(support, obj.p)
    w = np.zeros(obj.p)
    if idx.size == 0:
        return RestrictedSolveReport(
            w=w, support=idx, iterations=0, gradient_norm_on_support=0.0,
            ridge_applied=False, _value=obj.value_from_linpred(np.zeros(obj.n)),
        )
    X_s = obj.X[:, idx]
    if obj.family == "gaussian":
        w_s, ridge, iters, gnorm = _gaussian_restricted(X_s, obj.y, obj.n)
        w[idx] = w_s
        return RestrictedSolveReport(
            w=w, support=idx, iterations=iters, gradient_norm_on_support=gnorm,
            ridge_applied=ridge, _value=obj.value_from_linpred(X_s @ w_s),
        )
    w0 = np.zeros(idx.size) if warm_start is None else np.asarray(warm_start, float)[idx]
    w_s, info = _newton_minimize(obj, X_s, w0)
    w[idx] = w_s
    return RestrictedSolveReport(
        w=w,
        support=idx,
        iterations=info["iterations"],
        gradient_norm_on_support=info["gradient_norm"],
        ridge_applied=info["ridge_applied"],
        converged=info["converged"],
        capped=info["capped"],
        _value=info["value"],
    )


def _spd_solve_with_jitter(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve M x = b for symmetric positive semidefinite M.

    Singular M falls back to the pseudoinverse solution so the induced
    quadratic gain b'x/2 stays the exact projection value; a ridge would
    bias it low, which matters when a bound is tight.
    """
    try:
        c, low = scipy.linalg.cho_factor(M)
    except scipy.linalg.LinAlgError:
        return np.linalg.pinv(M, hermitian=True) @ b
    return scipy.linalg.cho_solve((c, low), b)


def partial_increment(
    obj: Objective,
    w: np.ndarray,
    g: int,
    partition: GroupPartition,
    linpred: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Best objective reduction over group ``g`` alone, and the step taking it.

    Returns (gain, alpha) with gain = Q(w) - Q(w + embed(g, alpha)) >= 0.
    For the gaussian family alpha is the closed-form residual projection
    coefficient; for logistic it comes from a per-group Newton solve with the
    rest of the linear predictor held fixed.
    """
    w = obj._check(w)
    idx = partition.groups[g]
    X_g = obj.X[:, idx]
    z = obj.X @ w if linpred is None else linpred
    if obj.family == "gaussian":
        r = obj.y - z
        b = X_g.T @ r
        sol = _spd_solve_with_jitter(X_g.T @ X_g, b)
        return max(0.0, float(b @ sol) / (2.0 * obj.n)), sol
    base = obj.value_from_linpred(z)
    # alpha starts at the current group coefficients' increment, i.e. zero.
    alpha, info = _newton_minimize(obj, X_g, np.zeros(idx.size), z_base=z, max_iter=50)
    return max(0.0, base - info["value"]), alpha


def forward_gain(
    obj: Objective,
    w: np.ndarray,
    g: int,
    partition: GroupPartition,
    linpred: np.ndarray | None = None,
) -> float:
    """Objective reduction from optimally fitting group ``g`` on top of ``w``.

    gain = Q(w) - min_alpha Q(w + embed(g, alpha)), always clipped at zero.
    """
    return partial_increment(obj, w, g, partition, linpred=linpred)[0]
