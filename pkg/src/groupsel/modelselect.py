"""Ten-fold cross-validation over path iteration t and discount lambda.

Candidate models are indexed by completed-iteration count t (the post-backward
snapshots), with t = 0 the null model.  Fold paths of unequal length are
aligned by padding shorter paths with their final validation loss.  Each fold
standardizes its training rows only and applies the training scales to the
validation rows; the winning model is refit on the full data and returned in
the raw coordinate system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .criterion import Dataset, make_dataset, make_objective, softplus, standardize
from .engine import (
    GREEDY,
    FittedModel,
    IgaConfig,
    SelectionPath,
    SelectionPolicy,
    run_path,
    state_at_iteration,
)
from .errors import DimensionError, RangeError
from .groups import GroupPartition
from .rng import STREAM_FOLDS, child_rng

LOSS_KINDS = ("mse", "nll")
DEFAULT_LAMBDA_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class CvPlan:
    """Fold assignment and search grids for one cross-validation run."""

    n: int
    folds: tuple[np.ndarray, ...]
    seed: int
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    loss: str = "mse"

    def __post_init__(self) -> None:
        if self.loss not in LOSS_KINDS:
            raise RangeError(f"loss must be one of {LOSS_KINDS}")
        counted = np.concatenate(self.folds)
        if sorted(counted.tolist()) != list(range(self.n)):
            raise RangeError("folds must partition the row indices")
        sizes = [len(f) for f in self.folds]
        if max(sizes) - min(sizes) > 1:
            raise RangeError("fold sizes must differ by at most one")


def kfold_split(n: int, K: int, seed: int) -> tuple[np.ndarray, ...]:
    """Seeded shuffle of ``range(n)`` cut into K contiguous blocks."""
    if not 1 <= K <= n:
        raise RangeError(f"need 1 <= K <= n, got K={K}, n={n}")
    perm = child_rng(seed, STREAM_FOLDS).permutation(n)
    return tuple(np.sort(block) for block in np.array_split(perm, K))


def make_cv_plan(
    n: int,
    seed: int,
    K: int = 10,
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID,
    loss: str = "mse",
) -> CvPlan:
    return CvPlan(n=n, folds=kfold_split(n, K, seed), seed=seed,
                  lambda_grid=tuple(float(l) for l in lambda_grid), loss=loss)


def cv_loss(coefficients: np.ndarray, X_val: np.ndarray, y_val: np.ndarray, kind: str) -> float:
    """Validation loss: mean squared error, or mean logistic negative log-likelihood."""
    if X_val.shape[1] != coefficients.shape[0] or X_val.shape[0] != y_val.shape[0]:
        raise DimensionError("validation rows do not match the coefficient vector")
    z = X_val @ coefficients
    if kind == "mse":
        r = y_val - z
        return float(r @ r) / len(y_val)
    if kind == "nll":
        return float(np.mean(softplus(-y_val * z)))
    raise RangeError(f"loss must be one of {LOSS_KINDS}")


@dataclass
class CvResult:
    """Loss surface over (lambda, t), the chosen pair, and the full-data refit."""

    lambda_grid: tuple[float, ...]
    mean_loss: np.ndarray  # (n_lambda, T+1); column t is iteration t, t=0 null
    lambda_star: float
    t_star: int
    model: FittedModel
    full_path: SelectionPath
    fold_path_lengths: list[list[int]] = field(default_factory=list)


def _fold_losses(
    dataset: Dataset,
    partition: GroupPartition,
    cfg: IgaConfig,
    policy: SelectionPolicy,
    train: np.ndarray,
    val: np.ndarray,
    family: str,
    loss_kind: str,
) -> np.ndarray:
    """Per-iteration validation losses of one fold's path (index 0: null model)."""
    train_ds = standardize(make_dataset(dataset.X[train], dataset.y[train]))
    obj = make_objective(family, train_ds)
    path = run_path(obj, partition, cfg, policy)
    X_val = dataset.X[val] * train_ds.column_scales
    y_val = dataset.y[val]
    losses = np.empty(len(path.snapshots) + 1)
    losses[0] = cv_loss(np.zeros(dataset.p), X_val, y_val, loss_kind)
    for t, snap in enumerate(path.snapshots, start=1):
        losses[t] = cv_loss(snap.coefficients, X_val, y_val, loss_kind)
    return losses


def _pad_to(losses: np.ndarray, width: int) -> np.ndarray:
    if losses.size >= width:
        return losses[:width]
    return np.concatenate([losses, np.full(width - losses.size, losses[-1])])


def cv_select(
    dataset: Dataset,
    partition: GroupPartition,
    cfg_template: IgaConfig,
    plan: CvPlan,
    policy: SelectionPolicy = GREEDY,
    jobs: int = 1,
) -> CvResult:
    """Select (lambda*, t*) by K-fold validation loss and refit on all rows.

    For each lambda in the plan's grid the engine is run on every training
    fold; iteration snapshots are scored on the held-out rows; the mean losses
    are minimized over (lambda, t) with ties broken by smaller t, then larger
    lambda.  The returned model's coefficients are in the raw coordinates of
    ``dataset``.  ``jobs`` fans the (lambda, fold) runs out over processes;
    results do not depend on it.
    """
    if plan.n != dataset.n:
        raise DimensionError(f"plan covers {plan.n} rows, dataset has {dataset.n}")
    family = "logistic" if plan.loss == "nll" else "gaussian"
    all_rows = np.arange(dataset.n)

    def one(lam: float, fold: np.ndarray) -> np.ndarray:
        cfg = _with_lambda(cfg_template, lam)
        train = np.setdiff1d(all_rows, fold)
        return _fold_losses(dataset, partition, cfg, policy, train, fold, family, plan.loss)

    tasks = [(lam, fold) for lam in plan.lambda_grid for fold in plan.folds]
    if jobs == 1:
        flat = [one(lam, fold) for lam, fold in tasks]
    else:
        from joblib import Parallel, delayed

        flat = Parallel(n_jobs=jobs)(delayed(one)(lam, fold) for lam, fold in tasks)
    K = len(plan.folds)
    per_lambda: list[list[np.ndarray]] = [
        flat[i * K:(i + 1) * K] for i in range(len(plan.lambda_grid))
    ]
    lengths: list[list[int]] = [[fl.size - 1 for fl in row] for row in per_lambda]
    T = max(fl.size for row in per_lambda for fl in row) - 1
    mean_loss = np.empty((len(plan.lambda_grid), T + 1))
    for i, fold_losses in enumerate(per_lambda):
        padded = np.stack([_pad_to(fl, T + 1) for fl in fold_losses])
        mean_loss[i] = padded.mean(axis=0)
    # smallest loss; ties prefer smaller t, then larger lambda
    best = (np.inf, 0, 0.0)
    for i, lam in enumerate(plan.lambda_grid):
        for t in range(T + 1):
            key = (mean_loss[i, t], t, -lam)
            if key < best:
                best = key
    _, t_star, neg_lam = best
    lambda_star = -neg_lam
    full_ds = standardize(make_dataset(dataset.X, dataset.y))
    obj = make_objective(family, full_ds)
    full_path = run_path(obj, partition, _with_lambda(cfg_template, lambda_star), policy)
    t_eff = min(t_star, len(full_path.snapshots))
    fitted = state_at_iteration(full_path, t_eff, obj, partition)
    raw_coef = fitted.coefficients * full_ds.column_scales
    model = FittedModel(
        coefficients=raw_coef,
        active_groups=fitted.active_groups,
        family=family,
        diagnostics={
            **fitted.diagnostics,
            "standardized_coefficients": fitted.coefficients,
            "column_scales": full_ds.column_scales,
            "lambda_star": lambda_star,
            "t_star": t_star,
            "t_refit": t_eff,
        },
    )
    return CvResult(
        lambda_grid=plan.lambda_grid,
        mean_loss=mean_loss,
        lambda_star=lambda_star,
        t_star=t_star,
        model=model,
        full_path=full_path,
        fold_path_lengths=lengths,
    )


def _with_lambda(cfg: IgaConfig, lam: float) -> IgaConfig:
    return IgaConfig(
        lam=lam,
        scoring_mode=cfg.scoring_mode,
        k_max=cfg.k_max,
        delta_floor=cfg.delta_floor,
        tie_tolerance=cfg.tie_tolerance,
        backward=cfg.backward,
    )


def cv_select_group_lasso(
    dataset: Dataset,
    partition: GroupPartition,
    plan: CvPlan,
    cfg=None,
    jobs: int = 1,
) -> tuple[FittedModel, dict]:
    """K-fold selection of the group lasso penalty weight alpha.

    The alpha grid is anchored at the full standardized dataset's alpha_max so
    every fold is scored on a common grid; ties prefer the larger (sparser)
    alpha.  Returns the full-data refit in raw coordinates plus a report.
    """
    from .baselines import GroupLassoConfig, default_alpha_grid, group_lasso_path

    if cfg is None:
        cfg = GroupLassoConfig()
    family = "logistic" if plan.loss == "nll" else "gaussian"
    full_ds = standardize(make_dataset(dataset.X, dataset.y))
    full_obj = make_objective(family, full_ds)
    grid = default_alpha_grid(full_obj, partition, cfg)
    cfg_grid = GroupLassoConfig(
        alpha_grid=tuple(grid),
        fista_tolerance=cfg.fista_tolerance,
        kkt_tolerance=cfg.kkt_tolerance,
        max_iterations=cfg.max_iterations,
    )
    all_rows = np.arange(dataset.n)

    def one(fold: np.ndarray) -> np.ndarray:
        train = np.setdiff1d(all_rows, fold)
        train_ds = standardize(make_dataset(dataset.X[train], dataset.y[train]))
        obj = make_objective(family, train_ds)
        path = group_lasso_path(obj, partition, cfg_grid)
        X_val = dataset.X[fold] * train_ds.column_scales
        return np.array([
            cv_loss(path.coefficients[ai], X_val, dataset.y[fold], plan.loss)
            for ai in range(grid.size)
        ])

    if jobs == 1:
        rows = [one(fold) for fold in plan.folds]
    else:
        from joblib import Parallel, delayed

        rows = Parallel(n_jobs=jobs)(delayed(one)(fold) for fold in plan.folds)
    losses = np.stack(rows)
    mean_loss = losses.mean(axis=0)
    # grid is decreasing, so the first argmin is the largest (sparsest) alpha
    a_star = int(np.argmin(mean_loss))
    full_path = group_lasso_path(full_obj, partition, cfg_grid)
    w_std = full_path.coefficients[a_star]
    model = FittedModel(
        coefficients=w_std * full_ds.column_scales,
        active_groups=full_path.active_groups[a_star],
        family=family,
        diagnostics={
            "alpha_star": float(grid[a_star]),
            "kkt_residual": float(full_path.kkt_residuals[a_star]),
            "standardized_coefficients": w_std,
            "column_scales": full_ds.column_scales,
        },
    )
    report = {
        "alphas": grid,
        "mean_loss": mean_loss,
        "alpha_star": float(grid[a_star]),
        "kkt_residuals": full_path.kkt_residuals,
    }
    return model, report
