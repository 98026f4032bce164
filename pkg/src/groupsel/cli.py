"""Command-line entry point.

Subcommands: simulate, fit, path, cv, baseline, verify, bench, serve.
Exit codes: 0 success, 2 usage error, 1 runtime error.  All randomness is
controlled by --seed; JSON outputs are byte-identical across reruns of the
same argv (floats written with 17 significant digits).  Group ids are
one-based in flags and outputs; groups.json stores zero-based indices.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .baselines import GroupLassoConfig
from .bench import METHODS, bench_table
from .criterion import Dataset, make_dataset, make_objective, standardize
from .engine import (
    GREEDY,
    IgaConfig,
    SelectionPolicy,
    path_to_dict,
    priority_policy,
    run_path,
)
from .errors import GroupselError, RangeError
from .groups import GroupPartition, partition_from_dict, singleton_partition
from .metrics import ReplicationSummary
from .modelselect import (
    DEFAULT_LAMBDA_GRID,
    cv_select,
    cv_select_group_lasso,
    make_cv_plan,
)
from .rng import child_rng
from .simulate import SimInstance, SimSpec, generate
from .verify import (
    gain_sandwich_check,
    gradient_check,
    logistic_regularity,
    phi_bounds,
    scaling_experiment,
)

_FAMILIES = ("gaussian", "logistic")


def _comma_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of numbers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _comma_ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in _comma_floats(text))


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--x", required=True, help="design matrix CSV (n rows, p columns)")
    p.add_argument("--y", required=True, help="response CSV (single column)")
    p.add_argument("--groups", required=True, help="groups.json (zero-based indices)")
    p.add_argument("--family", choices=_FAMILIES, default="gaussian")


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="candidate-set discount factor in (0, 1]")
    p.add_argument("--scoring", choices=("objective_reduction", "gradient_norm"),
                   default="objective_reduction")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--delta-floor", type=float, default=None)
    p.add_argument("--tie-tolerance", type=float, default=1e-12)
    p.add_argument("--forward-only", action="store_true",
                   help="disable the backward sweep")
    p.add_argument("--priority", type=_comma_ints, default=None,
                   help="comma list of one-based group ids to prefer inside A_lambda")


def _engine_config(args: argparse.Namespace, lam: float | None = None) -> IgaConfig:
    return IgaConfig(
        lam=args.lam if lam is None else lam,
        scoring_mode=args.scoring,
        k_max=args.k_max,
        delta_floor=args.delta_floor,
        tie_tolerance=args.tie_tolerance,
        backward=not args.forward_only,
    )


def _policy(args: argparse.Namespace) -> SelectionPolicy:
    if args.priority is None:
        return GREEDY
    for g in args.priority:
        if g < 1:
            raise RangeError(f"priority group ids are one-based, got {g}")
    return priority_policy(g - 1 for g in args.priority)


def _load(args: argparse.Namespace) -> tuple[Dataset, GroupPartition]:
    ds = fileio.load_design(args.x, args.y)
    partition = fileio.load_groups(args.groups)
    if partition.p != ds.p:
        raise RangeError(f"groups cover {partition.p} features, design has {ds.p}")
    return ds, partition


def _model_doc(model) -> dict:
    keep = ("lambda_star", "t_star", "t_refit", "alpha_star", "iteration",
            "objective_value", "kkt_residual", "converged")
    return {
        "family": model.family,
        "coefficients": model.coefficients,
        "active_groups": [g + 1 for g in model.active_groups],
        "diagnostics": {k: v for k, v in model.diagnostics.items() if k in keep},
    }


def _emit(args: argparse.Namespace, doc: dict, table_text: str | None = None) -> None:
    out = getattr(args, "out", None)
    if out:
        fileio.write_json(out, doc)
    fmt = getattr(args, "format", "table")
    if fmt == "json":
        print(fileio.dumps(doc))
    elif table_text:
        print(table_text)
    elif out:
        print(f"wrote {out}")


# -- subcommand implementations -------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> None:
    case = {"1": "case1", "2": "case2", "heuristic": "heuristic"}[args.case]
    spec = SimSpec(case=case, n=args.n, kbar=args.kbar, beta=args.beta,
                   p=args.p, m=args.m, q=args.q, rho=args.rho,
                   noise_variance=args.noise_variance, seed=args.seed)
    instance = generate(spec)
    fileio.save_bundle(args.out, instance)
    print(f"wrote X.csv, y.csv, groups.json, truth.json to {args.out}")


def cmd_fit(args: argparse.Namespace) -> None:
    ds, partition = _load(args)
    loss = "nll" if args.family == "logistic" else "mse"
    plan = make_cv_plan(ds.n, args.seed, K=args.folds, lambda_grid=(args.lam,), loss=loss)
    res = cv_select(ds, partition, _engine_config(args), plan, _policy(args), jobs=args.jobs)
    doc = {
        "model": _model_doc(res.model),
        "path": path_to_dict(res.full_path),
        "cv": {
            "lambda_grid": list(res.lambda_grid),
            "mean_loss": res.mean_loss,
            "lambda_star": res.lambda_star,
            "t_star": res.t_star,
        },
    }
    lines = [
        f"selected iteration t*={res.t_star} at lambda={res.lambda_star:g}",
        "active groups (one-based): "
        + (", ".join(str(g + 1) for g in res.model.active_groups) or "none"),
        "signed path: " + ", ".join(str(s) for s in res.full_path.signed_sequence()),
    ]
    _emit(args, doc, "\n".join(lines))


def cmd_path(args: argparse.Namespace) -> None:
    ds, partition = _load(args)
    if args.standardize:
        ds = standardize(ds)
    obj = make_objective(args.family, ds)
    path = run_path(obj, partition, _engine_config(args), _policy(args))
    doc = path_to_dict(path)
    text = "signed path: " + ", ".join(str(s) for s in path.signed_sequence()) + \
        f"\nfinish reason: {path.finish_reason}"
    _emit(args, doc, text)


def cmd_cv(args: argparse.Namespace) -> None:
    ds, partition = _load(args)
    loss = "nll" if args.family == "logistic" else "mse"
    plan = make_cv_plan(ds.n, args.seed, K=args.folds,
                        lambda_grid=args.lambda_grid, loss=loss)
    res = cv_select(ds, partition, _engine_config(args, lam=1.0), plan,
                    _policy(args), jobs=args.jobs)
    doc = {
        "model": _model_doc(res.model),
        "path": path_to_dict(res.full_path),
        "cv": {
            "lambda_grid": list(res.lambda_grid),
            "mean_loss": res.mean_loss,
            "lambda_star": res.lambda_star,
            "t_star": res.t_star,
            "fold_path_lengths": res.fold_path_lengths,
        },
    }
    text = (
        f"lambda*={res.lambda_star:g}, t*={res.t_star}\n"
        "active groups (one-based): "
        + (", ".join(str(g + 1) for g in res.model.active_groups) or "none")
    )
    _emit(args, doc, text)


def cmd_baseline(args: argparse.Namespace) -> None:
    ds, partition = _load(args)
    loss = "nll" if args.family == "logistic" else "mse"
    if args.method == "grouplasso":
        plan = make_cv_plan(ds.n, args.seed, K=args.folds, lambda_grid=(1.0,), loss=loss)
        cfg = GroupLassoConfig(
            alpha_grid=args.alpha_grid,
            n_alphas=args.n_alphas,
            alpha_min_ratio=args.alpha_min_ratio,
        )
        model, report = cv_select_group_lasso(ds, partition, plan, cfg, jobs=args.jobs)
        doc = {"model": _model_doc(model), "cv": report}
        text = (
            f"alpha*={report['alpha_star']:.6g}, "
            f"kkt residual={model.diagnostics['kkt_residual']:.3e}\n"
            "active groups (one-based): "
            + (", ".join(str(g + 1) for g in model.active_groups) or "none")
        )
    else:  # foba: the same engine on singleton groups
        plan = make_cv_plan(ds.n, args.seed, K=args.folds, lambda_grid=(1.0,), loss=loss)
        res = cv_select(ds, singleton_partition(ds.p), _engine_config(args), plan,
                        jobs=args.jobs)
        doc = {"model": _model_doc(res.model), "path": path_to_dict(res.full_path),
               "cv": {"t_star": res.t_star, "mean_loss": res.mean_loss}}
        text = (
            f"t*={res.t_star}\nactive features (one-based): "
            + (", ".join(str(g + 1) for g in res.model.active_groups) or "none")
        )
    _emit(args, doc, text)


def _bench_rows(summaries: dict[str, ReplicationSummary]) -> str:
    labels = {"iga": "IGA", "iga_lambda": "IGA-lambda", "giga": "GIGA",
              "grouplasso": "group lasso", "foba": "FoBa"}
    cols = [("l2_error", "||w-w*||"), ("correct_groups", "|G^ & G-|"),
            ("incorrect_groups", "|G^ \\ G-|")]
    head = f"{'method':<14}" + "".join(f"{title:>18}" for _, title in cols)
    rows = [head, "-" * len(head)]
    for method, summ in summaries.items():
        cells = "".join(
            f"{summ.mean[key]:>10.3f} ({summ.standard_error[key]:.2f})"
            for key, _ in cols
        )
        rows.append(f"{labels.get(method, method):<14}" + cells)
    return "\n".join(rows)


def cmd_bench(args: argparse.Namespace) -> None:
    methods = args.methods if args.methods else None
    result = bench_table(args.table, cell=args.cell, reps=args.reps, n=args.n,
                         seed=args.seed, methods=methods, jobs=args.jobs,
                         noise_variance=args.noise_variance)
    doc = {
        "table": result["table"], "case": result["case"], "cell": result["cell"],
        "n": result["n"], "replications": result["replications"], "seed": result["seed"],
        "summaries": {
            m: {"n_replications": s.n_replications, "mean": s.mean,
                "standard_error": s.standard_error}
            for m, s in result["summaries"].items()
        },
    }
    _emit(args, doc, _bench_rows(result["summaries"]))


def _random_objective(family: str, n: int, p: int, seed: int):
    rng = child_rng(seed, 97)
    X = rng.standard_normal((n, p))
    if family == "logistic":
        y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    else:
        y = rng.standard_normal(n)
    return make_objective(family, make_dataset(X, y))


def cmd_verify(args: argparse.Namespace) -> None:
    if args.check == "gradient":
        worst = {}
        for family in _FAMILIES:
            obj = _random_objective(family, args.n, args.p, args.seed)
            worst[family] = gradient_check(obj, trials=args.trials, seed=args.seed)
        doc = {"check": "gradient", "trials": args.trials,
               "worst_relative_error": worst, "tolerance": 1e-5,
               "passed": all(v <= 1e-5 for v in worst.values())}
        text = "\n".join(f"{fam}: worst relative error {v:.3e}" for fam, v in worst.items())
    elif args.check == "sandwich":
        q = args.group_size
        if args.p % q:
            raise RangeError(f"p={args.p} not divisible by group size {q}")
        obj = _random_objective("gaussian", args.n, args.p, args.seed)
        part = GroupPartition(p=args.p, groups=tuple(
            np.arange(i * q, (i + 1) * q, dtype=np.intp) for i in range(args.p // q)
        ))
        rep = gain_sandwich_check(obj, part, trials=args.trials, seed=args.seed)
        doc = {"check": "sandwich", "trials": rep.trials, "passed_trials": rep.passed,
               "max_relative_violation": rep.max_relative_violation,
               "passed": rep.all_passed}
        text = f"sandwich: {rep.passed}/{rep.trials} trials inside the bounds"
    elif args.check == "phi":
        ds, partition = _load(args)
        obj = make_objective(args.family, ds)
        rep = phi_bounds(obj, partition, args.t)
        doc = {"check": "phi", "t": rep.t, "phi_minus": rep.phi_minus,
               "phi_plus": rep.phi_plus, "kappa": rep.kappa,
               "argmin_set": [g + 1 for g in sorted(rep.argmin_set)],
               "argmax_set": [g + 1 for g in sorted(rep.argmax_set)],
               "exact": rep.exact}
        text = (f"phi-(t={rep.t})={rep.phi_minus:.6g}  phi+(t={rep.t})={rep.phi_plus:.6g}"
                f"  kappa={rep.kappa:.6g}")
    elif args.check == "regularity":
        instance = _load_bundle_instance(args.bundle)
        rep = logistic_regularity(instance)
        doc = {"check": "regularity", "U1": rep.U1, "U2": rep.U2, "U3": rep.U3}
        text = f"U1={rep.U1:.6g}  U2={rep.U2:.6g}  U3={rep.U3:.6g}"
    elif args.check == "scaling":
        rep = scaling_experiment(args.family, n_grid=args.n_grid,
                                 replications=args.reps, seed=args.seed,
                                 kbar=args.kbar, beta=args.beta, jobs=args.jobs)
        doc = {"check": "scaling", "n_grid": list(rep.n_grid),
               "mean_squared_error": list(rep.mean_squared_error),
               "recovery_rate": list(rep.recovery_rate), "slope": rep.slope}
        if args.out:
            lines = ["n,mean_squared_error,recovery_rate"]
            for n, mse, rate in zip(rep.n_grid, rep.mean_squared_error, rep.recovery_rate):
                lines.append(f"{n},{fileio.format_float(mse)},{fileio.format_float(rate)}")
            Path(args.out).write_text("\n".join(lines) + "\n")
            print(f"slope={rep.slope:.4f}; wrote {args.out}")
            return
        text = f"slope={rep.slope:.4f}"
    else:  # pragma: no cover - argparse restricts choices
        raise RangeError(f"unknown check {args.check!r}")
    _emit(args, doc, text)


def _load_bundle_instance(bundle: str) -> SimInstance:
    bundle_path = Path(bundle)
    ds = fileio.load_design(bundle_path / "X.csv", bundle_path / "y.csv")
    partition = fileio.load_groups(bundle_path / "groups.json")
    truth_doc = fileio.read_json(bundle_path / "truth.json")
    from .groups import GroupSet

    spec = SimSpec(**truth_doc["spec"])
    return SimInstance(
        dataset=ds,
        partition=partition,
        truth=np.asarray(truth_doc["coefficients"], dtype=float),
        relevant=GroupSet(truth_doc["relevant_groups"]),
        spec=spec,
    )


def cmd_serve(args: argparse.Namespace) -> None:
    import uvicorn

    from .session import create_app

    uvicorn.run(create_app(snapshot_dir=args.snapshot_dir),
                host=args.host, port=args.port, log_level="warning")


# -- parser wiring ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupsel",
        description="Group-sparse model selection: greedy forward-backward paths, "
                    "group lasso, cross-validation, simulations, verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset bundle")
    p.add_argument("--case", choices=("1", "2", "heuristic"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kbar", type=int, default=5)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--p", type=int, default=1000)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--noise-variance", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="greedy path at one lambda + ten-fold CV refit")
    _add_data_flags(p)
    _add_engine_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="model JSON path")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="run one selection path (no CV)")
    _add_data_flags(p)
    _add_engine_flags(p)
    p.add_argument("--standardize", action="store_true",
                   help="rescale columns to norm sqrt(n) before fitting")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("cv", help="cross-validate over (lambda, iteration)")
    _add_data_flags(p)
    _add_engine_flags(p)
    p.add_argument("--lambda-grid", type=_comma_floats, default=DEFAULT_LAMBDA_GRID)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("baseline", help="group lasso or per-feature greedy (FoBa)")
    p.add_argument("--method", choices=("grouplasso", "foba"), required=True)
    _add_data_flags(p)
    _add_engine_flags(p)
    p.add_argument("--alpha-grid", type=_comma_floats, default=None)
    p.add_argument("--n-alphas", type=int, default=100)
    p.add_argument("--alpha-min-ratio", type=float, default=1e-3)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("bench", help="replicate a cell of the comparison tables")
    p.add_argument("--table", type=int, choices=(2, 3), required=True)
    p.add_argument("--cell", default="beta=1,kbar=5", help='e.g. "beta=0.4,kbar=9"')
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", type=lambda s: tuple(s.split(",")), default=None,
                   help=f"comma list from {METHODS}")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--noise-variance", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="numerical checks of the theory quantities")
    vsub = p.add_subparsers(dest="check", required=True)

    v = vsub.add_parser("gradient", help="finite-difference gradient comparison")
    v.add_argument("--n", type=int, default=60)
    v.add_argument("--p", type=int, default=12)
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("sandwich", help="forward-gain eigenvalue bounds")
    v.add_argument("--n", type=int, default=80)
    v.add_argument("--p", type=int, default=12)
    v.add_argument("--group-size", type=int, default=2)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("phi", help="restricted eigenvalue extremes over <=t groups")
    _add_data_flags(v)
    v.add_argument("--t", type=int, required=True)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("regularity", help="logistic curvature constants U1-U3")
    v.add_argument("--bundle", required=True, help="directory written by simulate")
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("scaling", help="error decay across sample sizes")
    v.add_argument("--family", choices=_FAMILIES, default="gaussian")
    v.add_argument("--n-grid", type=_comma_ints, default=(200, 400, 800, 1600))
    v.add_argument("--reps", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--kbar", type=int, default=5)
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", default=None, help="CSV of (n, mean error^2, recovery rate)")
    v.add_argument("--format", choices=("json", "table"), default="table")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the interactive session HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--snapshot-dir", default=None,
                   help="persist finished sessions as JSON here")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (GroupselError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
