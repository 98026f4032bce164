"""Replication harness for the simulation benchmarks.

One replication = generate an instance, tune each requested method by
ten-fold cross-validation, evaluate against the truth.  Replication seeds
are derived independently from the base seed, so a run is reproducible
under any --jobs setting and any subset of replications.
"""

from __future__ import annotations

from typing import Sequence

from .engine import GREEDY, IgaConfig, SelectionPolicy, priority_policy
from .errors import RangeError
from .groups import singleton_partition
from .metrics import (
    LASSO_GROUP_NORM_THRESHOLD,
    EvalReport,
    ReplicationSummary,
    evaluate,
    summarize,
)
from .modelselect import (
    DEFAULT_LAMBDA_GRID,
    cv_select,
    cv_select_group_lasso,
    make_cv_plan,
)
from .rng import STREAM_REPLICATION, child_seed
from .simulate import SimInstance, SimSpec, generate, make_priority_list

METHODS = ("iga", "iga_lambda", "giga", "grouplasso", "foba")
TABLE_CASES = {2: "case1", 3: "case2"}

# Paths run to three times the true sparsity; CV prunes the overshoot.
BUDGET_FACTOR = 3


def _loss_kind(case: str) -> str:
    return "nll" if case == "case2" else "mse"


def fit_method(method: str, instance: SimInstance, seed: int):
    """Cross-validated fit of one method on one instance (raw coordinates)."""
    ds = instance.dataset
    part = instance.partition
    spec = instance.spec
    loss = _loss_kind(spec.case)
    if method == "grouplasso":
        plan = make_cv_plan(ds.n, seed, loss=loss)
        model, _ = cv_select_group_lasso(ds, part, plan)
        return model
    if method == "foba":
        # group structure ignored: singleton groups, feature-count budget
        k_cap = min(ds.p, BUDGET_FACTOR * spec.kbar * spec.q)
        cfg = IgaConfig(lam=1.0, k_max=k_cap)
        plan = make_cv_plan(ds.n, seed, lambda_grid=(1.0,), loss=loss)
        return cv_select(ds, singleton_partition(ds.p), cfg, plan).model
    k_cap = min(part.m, BUDGET_FACTOR * spec.kbar)
    policy: SelectionPolicy = GREEDY
    grid: Sequence[float] = (1.0,)
    if method == "iga":
        cfg = IgaConfig(lam=1.0, k_max=k_cap)
    elif method == "giga":
        cfg = IgaConfig(lam=1.0, scoring_mode="gradient_norm", k_max=k_cap)
    elif method == "iga_lambda":
        cfg = IgaConfig(k_max=k_cap)
        policy = priority_policy(make_priority_list(instance, seed))
        grid = DEFAULT_LAMBDA_GRID
    else:
        raise RangeError(f"method must be one of {METHODS}, got {method!r}")
    plan = make_cv_plan(ds.n, seed, lambda_grid=tuple(grid), loss=loss)
    return cv_select(ds, part, cfg, plan, policy).model


def run_replication(
    case: str,
    n: int,
    kbar: int = 5,
    beta: float = 1.0,
    seed: int = 0,
    rep: int = 0,
    methods: Sequence[str] = ("iga",),
    noise_variance: float | None = None,
) -> dict[str, EvalReport]:
    """Generate replication ``rep`` and evaluate every requested method on it."""
    if case not in TABLE_CASES.values():
        raise RangeError(f"case must be 'case1' or 'case2', got {case!r}")
    rep_seed = child_seed(seed, STREAM_REPLICATION, rep)
    kwargs = {} if noise_variance is None else {"noise_variance": float(noise_variance)}
    instance = generate(SimSpec(case=case, n=n, kbar=kbar, beta=beta, seed=rep_seed, **kwargs))
    out: dict[str, EvalReport] = {}
    for method in methods:
        model = fit_method(method, instance, rep_seed)
        thr = LASSO_GROUP_NORM_THRESHOLD if method == "grouplasso" else 0.0
        out[method] = evaluate(model, instance, group_norm_threshold=thr)
    return out


def run_replications(
    case: str,
    n: int,
    kbar: int = 5,
    beta: float = 1.0,
    seed: int = 0,
    reps: int = 20,
    methods: Sequence[str] = ("iga",),
    jobs: int = 1,
    noise_variance: float | None = None,
) -> list[dict[str, EvalReport]]:
    args = [(case, n, kbar, beta, seed, rep, tuple(methods), noise_variance)
            for rep in range(reps)]
    if jobs == 1:
        return [run_replication(*a) for a in args]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=jobs)(delayed(run_replication)(*a) for a in args)


def parse_cell(cell: str) -> dict[str, float]:
    """Parse a table-cell spec like ``"beta=1,kbar=5"``."""
    out: dict[str, float] = {}
    for piece in cell.split(","):
        piece = piece.strip()
        if not piece:
            continue
        key, _, value = piece.partition("=")
        key = key.strip()
        if key not in ("beta", "kbar") or not value.strip():
            raise RangeError(f"cell entries must be beta=<float>,kbar=<int>; got {piece!r}")
        out[key] = float(value)
    return out


def bench_table(
    table: int,
    cell: str = "beta=1,kbar=5",
    reps: int = 20,
    n: int = 300,
    seed: int = 0,
    methods: Sequence[str] | None = None,
    jobs: int = 1,
    noise_variance: float | None = None,
) -> dict:
    """Run one cell of the simulation comparison tables.

    Returns per-method mean/SE summaries plus the raw per-replication reports.
    """
    if table not in TABLE_CASES:
        raise RangeError(f"table must be 2 or 3, got {table}")
    if methods is None:
        methods = ("iga", "iga_lambda", "grouplasso", "foba")
    parsed = parse_cell(cell)
    kbar = int(parsed.get("kbar", 5))
    beta = float(parsed.get("beta", 1.0))
    reports = run_replications(
        TABLE_CASES[table], n, kbar=kbar, beta=beta, seed=seed,
        reps=reps, methods=methods, jobs=jobs, noise_variance=noise_variance,
    )
    summaries: dict[str, ReplicationSummary] = {
        method: summarize([r[method] for r in reports]) for method in methods
    }
    return {
        "table": table,
        "case": TABLE_CASES[table],
        "cell": {"beta": beta, "kbar": kbar},
        "n": n,
        "replications": reps,
        "seed": seed,
        "methods": list(methods),
        "summaries": summaries,
        "reports": {m: [r[m] for r in reports] for m in methods},
    }
