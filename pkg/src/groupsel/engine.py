"""Forward-backward greedy group selection paths.

The engine alternates two moves.  A forward step scores every inactive group
(either by exact objective reduction or by group gradient norm), forms the
discounted candidate set A_lambda = {g : score >= lambda * best}, lets a
selection policy pick one member, and refits on the enlarged support,
recording the level gain delta^(k) = Q before - Q after.  A backward sweep
then repeatedly removes the cheapest active group while its removal costs
less than delta^(k)/2 at the current level, refitting after each removal.

Level gains live on a stack: pushed by forward steps, popped by removals, so
the threshold always refers to the gain recorded when the current level was
entered.  A group added in the current step can never be removed by the same
sweep (its removal cost is at least the full level gain).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .criterion import Objective, forward_gain, partial_increment, restricted_minimize
from .errors import (
    DimensionError,
    EngineInvariantError,
    NoCandidates,
    PolicyError,
    RangeError,
)
from .groups import GroupPartition, GroupSet, feature_set

SCORING_MODES = ("objective_reduction", "gradient_norm")
POLICY_KINDS = ("greedy", "priority_list", "interactive")

# Relative floating-point slack for internal invariant checks.
_FP_SLACK = 1e-9


@dataclass(frozen=True)
class IgaConfig:
    """Tuning knobs of the path engine.

    Attributes
    ----------
    lam : float
        Discount factor in (0, 1]; a group is a candidate when its score is
        at least ``lam`` times the best score.
    scoring_mode : str
        "objective_reduction" scores by exact forward gain; "gradient_norm"
        scores by the group gradient norm (the gradient variant).
    k_max : int or None
        Cap on the number of active groups; None means min(m, n/qbar) with
        qbar the mean group size.
    delta_floor : float or None
        Absolute termination threshold on the best score; None means
        1e-10 * Q(0).  In gradient mode this is the epsilon of the
        gradient-sup-norm termination test.
    tie_tolerance : float
        Relative tolerance for candidate-set membership at the lambda*best
        boundary.
    backward : bool
        Disable to run forward-only stepwise selection.
    """

    lam: float = 1.0
    scoring_mode: str = "objective_reduction"
    k_max: int | None = None
    delta_floor: float | None = None
    tie_tolerance: float = 1e-12
    backward: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.lam <= 1.0:
            raise RangeError(f"lam must be in (0, 1], got {self.lam}")
        if self.scoring_mode not in SCORING_MODES:
            raise RangeError(f"scoring_mode must be one of {SCORING_MODES}")
        if self.k_max is not None and self.k_max < 1:
            raise RangeError(f"k_max must be >= 1, got {self.k_max}")
        if self.delta_floor is not None and self.delta_floor < 0:
            raise RangeError("delta_floor must be nonnegative")
        if self.tie_tolerance < 0:
            raise RangeError("tie_tolerance must be nonnegative")


@dataclass(frozen=True)
class SelectionPolicy:
    """How the forward step chooses among the candidate set.

    kind "greedy" takes the top score; "priority_list" prefers the best-scored
    member of ``priority`` that is inside A_lambda, falling back to greedy;
    "interactive" delegates to ``chooser``, which receives the scored
    candidate list and must return a group inside A_lambda.
    """

    kind: str = "greedy"
    priority: frozenset = frozenset()
    chooser: Callable[[list["Candidate"]], int] | None = None

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise RangeError(f"policy kind must be one of {POLICY_KINDS}")
        if self.kind == "interactive" and self.chooser is None:
            raise RangeError("interactive policy requires a chooser")


GREEDY = SelectionPolicy()


def priority_policy(members: Iterable[int]) -> SelectionPolicy:
    return SelectionPolicy(kind="priority_list", priority=frozenset(int(g) for g in members))


@dataclass(frozen=True)
class Candidate:
    group: int
    score: float
    in_A_lambda: bool


@dataclass(frozen=True)
class PathEvent:
    """One signed step of the selection path."""

    action: str  # "add" | "remove"
    group: int
    Q_after: float
    level_gain: float
    iteration: int

    @property
    def signed(self) -> int:
        """One-based display form: +g for adds, -g for removals."""
        return (self.group + 1) if self.action == "add" else -(self.group + 1)


@dataclass(frozen=True)
class Snapshot:
    """Active set and coefficients after a completed forward+backward iteration."""

    iteration: int
    active_groups: tuple[int, ...]
    coefficients: np.ndarray
    Q: float


@dataclass
class SelectionPath:
    """Ordered add/remove events plus per-iteration snapshots."""

    events: list[PathEvent]
    snapshots: list[Snapshot]
    Q_initial: float
    finish_reason: str | None = None

    def signed_sequence(self) -> list[int]:
        return [e.signed for e in self.events]

    @property
    def iterations(self) -> int:
        return len(self.snapshots)

    def final_active(self) -> tuple[int, ...]:
        return self.snapshots[-1].active_groups if self.snapshots else ()


@dataclass(frozen=True, eq=False)
class FittedModel:
    """A coefficient vector with its active groups and fit diagnostics."""

    coefficients: np.ndarray
    active_groups: tuple[int, ...]
    family: str
    diagnostics: dict = field(default_factory=dict)


class _ScoreWorkspace:
    """Per-(objective, partition) precomputation for fast candidate scoring.

    For gaussian objectives with equal-sized groups, all forward gains are a
    single X' r matvec plus a batched quadratic form against precomputed
    inverse group Grams.  Everything else falls back to per-group solves.
    """

    def __init__(self, obj: Objective, partition: GroupPartition):
        self.obj = obj
        self.partition = partition
        X = obj.X
        self.batched = obj.family == "gaussian" and partition.equal_sized
        if self.batched:
            idxmat = partition.index_matrix
            cols = X[:, idxmat]  # (n, m, q)
            grams = np.einsum("nmq,nmr->mqr", cols, cols) / obj.n
            try:
                self.gram_inv = np.linalg.inv(grams)
            except np.linalg.LinAlgError:
                self.gram_inv = np.stack([_safe_inv(g) for g in grams])
            self.idxmat = idxmat
        elif obj.family == "gaussian":
            self.gram_inv_list = [
                _safe_inv(X[:, idx].T @ X[:, idx] / obj.n) for idx in partition.groups
            ]

    def scores(self, w: np.ndarray, z: np.ndarray, inactive: np.ndarray, mode: str) -> np.ndarray:
        """Scores for the given inactive group indices, aligned with them."""
        obj, part = self.obj, self.partition
        if mode == "gradient_norm":
            c = obj.X.T @ obj.grad_pieces(z) / obj.n
            if part.equal_sized:
                return np.linalg.norm(c[part.index_matrix[inactive]], axis=1)
            return np.array([np.linalg.norm(c[part.groups[g]]) for g in inactive])
        if obj.family == "gaussian":
            c = obj.X.T @ (obj.y - z) / obj.n
            if self.batched:
                cg = c[self.idxmat[inactive]]
                q = 0.5 * np.einsum("mq,mqr,mr->m", cg, self.gram_inv[inactive], cg)
            else:
                q = np.array(
                    [
                        0.5 * c[part.groups[g]] @ self.gram_inv_list[g] @ c[part.groups[g]]
                        for g in inactive
                    ]
                )
            return np.maximum(q, 0.0)
        return np.array(
            [forward_gain(obj, w, int(g), part, linpred=z) for g in inactive]
        )


def _safe_inv(gram: np.ndarray) -> np.ndarray:
    """Inverse of a group Gram; pseudoinverse when singular.

    The pseudoinverse keeps the quadratic-form gain 0.5 c' G^+ c equal to the
    projection gain onto the group's column space (zero for a zero group).
    """
    try:
        return np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        return np.linalg.pinv(gram, hermitian=True)


def _rank_candidates(
    groups: np.ndarray, scores: np.ndarray, lam: float, tie_tolerance: float
) -> list[Candidate]:
    order = np.lexsort((groups, -scores))
    best = float(scores[order[0]])
    cutoff = lam * best * (1.0 - tie_tolerance)
    return [
        Candidate(group=int(groups[i]), score=float(scores[i]), in_A_lambda=bool(scores[i] >= cutoff))
        for i in order
    ]


def candidate_set(
    obj: Objective,
    w: np.ndarray,
    active: Iterable[int],
    cfg: IgaConfig,
    partition: GroupPartition,
    workspace: _ScoreWorkspace | None = None,
    linpred: np.ndarray | None = None,
) -> list[Candidate]:
    """Scored inactive groups, sorted by score descending (ties: lower index).

    ``in_A_lambda`` marks scores within ``cfg.lam`` of the best, with relative
    round-off tolerance.  Raises :class:`NoCandidates` when every group is
    active.
    """
    members = GroupSet.checked(active, partition.m)
    inactive = np.array([g for g in range(partition.m) if g not in members], dtype=np.intp)
    if inactive.size == 0:
        raise NoCandidates("all groups are active")
    w = obj._check(np.asarray(w, dtype=float))
    z = obj.X @ w if linpred is None else linpred
    if workspace is not None:
        scores = workspace.scores(w, z, inactive, cfg.scoring_mode)
    elif cfg.scoring_mode == "gradient_norm":
        grad = obj.X.T @ obj.grad_pieces(z) / obj.n
        scores = np.array([np.linalg.norm(grad[partition.groups[g]]) for g in inactive])
    else:
        scores = np.array(
            [forward_gain(obj, w, int(g), partition, linpred=z) for g in inactive]
        )
    return _rank_candidates(inactive, scores, cfg.lam, cfg.tie_tolerance)


class PathEngine:
    """Stateful driver of one selection path.

    The engine owns the iterate ``w``, its linear predictor, the active set,
    the per-level gain stack, and the event history.  ``pick`` performs one
    forward step (the picked group must lie in A_lambda) followed by the
    automatic backward sweep; ``candidates`` holds the current scored list
    while the path is unfinished.
    """

    def __init__(self, obj: Objective, partition: GroupPartition, cfg: IgaConfig):
        self.obj = obj
        self.partition = partition
        self.cfg = cfg
        n, p, m = obj.n, obj.p, partition.m
        if partition.p != p:
            raise DimensionError(f"partition covers {partition.p} features, data has {p}")
        qbar = p / m
        self.k_max = cfg.k_max if cfg.k_max is not None else max(1, min(m, int(n / qbar)))
        self.w = np.zeros(p)
        self.z = np.zeros(n)
        self.Q_initial = obj.value_from_linpred(self.z)
        self.Q = self.Q_initial
        self.delta_floor = (
            cfg.delta_floor if cfg.delta_floor is not None else 1e-10 * self.Q_initial
        )
        self._slack = _FP_SLACK * (1.0 + abs(self.Q_initial))
        self.active: list[int] = []
        self.delta_stack: list[float] = []
        self.events: list[PathEvent] = []
        self.snapshots: list[Snapshot] = []
        self.iteration = 0
        self.finished = False
        self.finish_reason: str | None = None
        self.candidates: list[Candidate] | None = None
        self._workspace = _ScoreWorkspace(obj, partition)
        self._picks = 0
        self._pick_guard = 2 * self.k_max * m
        self._refresh_candidates()

    # -- forward ---------------------------------------------------------

    def _refresh_candidates(self) -> None:
        if len(self.active) >= self.k_max:
            self._finish("k_max")
            return
        if len(self.active) == self.partition.m:
            self._finish("all_groups_active")
            return
        cands = candidate_set(
            self.obj, self.w, self.active, self.cfg, self.partition,
            workspace=self._workspace, linpred=self.z,
        )
        best = cands[0].score
        if best <= 0.0 or best < self.delta_floor:
            self._finish("score_floor")
            return
        self.candidates = cands

    def _finish(self, reason: str) -> None:
        self.finished = True
        self.finish_reason = reason
        self.candidates = None

    def halt(self, reason: str = "halted") -> None:
        """Freeze the path where it stands (e.g. the operator is done picking)."""
        if not self.finished:
            self._finish(reason)

    def pick(self, group: int) -> list[PathEvent]:
        """Forward step on ``group`` (must be in A_lambda), then backward sweep.

        Returns the events recorded this iteration.  On an invalid pick the
        state is left untouched and :class:`PolicyError` is raised.
        """
        if self.finished or self.candidates is None:
            raise PolicyError("path already finished")
        entry = next((c for c in self.candidates if c.group == group), None)
        if entry is None:
            raise PolicyError(f"group {group} is not an inactive group")
        if not entry.in_A_lambda:
            raise PolicyError(f"group {group} is outside the candidate set A_lambda")
        if self._picks >= self._pick_guard:
            raise EngineInvariantError("forward-step guard exceeded; path failed to halt")
        self._picks += 1
        best_score = self.candidates[0].score

        new_active = self.active + [int(group)]
        start = self.w
        if self.obj.family != "gaussian":
            # Seed the refit at the single-group optimum so its achieved value
            # is never above the score that admitted this pick; a cold start
            # can stall short of it on near-separable data.
            _, alpha = partial_increment(self.obj, self.w, group, self.partition, linpred=self.z)
            start = self.w.copy()
            start[self.partition.groups[group]] = alpha
        report = restricted_minimize(
            self.obj, feature_set(self.partition, new_active), warm_start=start
        )
        Q_new = report.objective_value
        delta = self.Q - Q_new
        self._check_forward_invariant(delta, best_score)
        self.active = new_active
        self.delta_stack.append(delta)
        self._set_iterate(report.w, Q_new)
        self.iteration += 1
        events = [
            PathEvent(
                action="add", group=int(group), Q_after=Q_new,
                level_gain=delta, iteration=self.iteration,
            )
        ]
        self.events.append(events[0])
        if self.cfg.backward:
            events.extend(self.backward_sweep())
        self.snapshots.append(
            Snapshot(
                iteration=self.iteration,
                active_groups=tuple(sorted(self.active)),
                coefficients=self.w.copy(),
                Q=self.Q,
            )
        )
        self._refresh_candidates()
        return events

    def _check_forward_invariant(self, delta: float, best_score: float) -> None:
        if self.cfg.scoring_mode == "objective_reduction":
            floor = self.cfg.lam * max(best_score, self.delta_floor) * (1.0 - self.cfg.tie_tolerance)
            if delta < floor - self._slack:
                raise EngineInvariantError(
                    f"forward gain {delta:.3e} below lambda-discounted floor {floor:.3e}"
                )
        elif delta < -self._slack:
            raise EngineInvariantError(f"forward step increased the objective by {-delta:.3e}")

    def _set_iterate(self, w: np.ndarray, Q: float) -> None:
        self.w = w
        idx = feature_set(self.partition, self.active)
        self.z = self.obj.X[:, idx] @ w[idx] if idx.size else np.zeros(self.obj.n)
        self.Q = Q

    # -- backward --------------------------------------------------------

    def removal_costs(self) -> list[tuple[int, float]]:
        """(group, Q(w without the group) - Q(w)) for each active group."""
        out = []
        for g in self.active:
            idx = self.partition.groups[g]
            z_minus = self.z - self.obj.X[:, idx] @ self.w[idx]
            out.append((g, self.obj.value_from_linpred(z_minus) - self.Q))
        return out

    def backward_sweep(self) -> list[PathEvent]:
        """Remove cheapest groups while removal costs stay under delta^(k)/2."""
        removed: list[PathEvent] = []
        while self.active:
            costs = self.removal_costs()
            g_min, c_min = min(costs, key=lambda t: (t[1], t[0]))
            if c_min >= self.delta_stack[-1] / 2.0:
                break
            popped = self.delta_stack.pop()
            self.active.remove(g_min)
            report = restricted_minimize(
                self.obj, feature_set(self.partition, self.active), warm_start=self.w
            )
            self._set_iterate(report.w, report.objective_value)
            event = PathEvent(
                action="remove", group=g_min, Q_after=self.Q,
                level_gain=popped, iteration=self.iteration,
            )
            self.events.append(event)
            removed.append(event)
        return removed

    # -- driving ---------------------------------------------------------

    def auto(self, steps: int) -> list[PathEvent]:
        """Apply up to ``steps`` greedy picks (stops early on termination)."""
        if steps < 0:
            raise RangeError("steps must be nonnegative")
        out: list[PathEvent] = []
        for _ in range(steps):
            if self.finished:
                break
            out.extend(self.pick(self.candidates[0].group))
        return out

    def path(self) -> SelectionPath:
        return SelectionPath(
            events=list(self.events),
            snapshots=list(self.snapshots),
            Q_initial=self.Q_initial,
            finish_reason=self.finish_reason,
        )


def _policy_choice(policy: SelectionPolicy, candidates: list[Candidate]) -> int:
    if policy.kind == "greedy":
        return candidates[0].group
    if policy.kind == "priority_list":
        for c in candidates:  # sorted by score, so first hit is the best
            if c.in_A_lambda and c.group in policy.priority:
                return c.group
        return candidates[0].group
    return int(policy.chooser(candidates))


def forward_step(engine: PathEngine, policy: SelectionPolicy = GREEDY) -> list[PathEvent] | None:
    """One policy-driven forward step plus backward sweep; None if finished."""
    if engine.finished:
        return None
    return engine.pick(_policy_choice(policy, engine.candidates))


def run_path(
    obj: Objective,
    partition: GroupPartition,
    cfg: IgaConfig,
    policy: SelectionPolicy = GREEDY,
) -> SelectionPath:
    """Run the full forward-backward path to termination.

    Termination: best score below the floor (or zero), the active set
    reaching ``k_max``, or every group active.  The same inputs always
    reproduce the same path bit for bit.
    """
    engine = PathEngine(obj, partition, cfg)
    while not engine.finished:
        engine.pick(_policy_choice(policy, engine.candidates))
    return engine.path()


def state_at_iteration(
    path: SelectionPath, t: int, obj: Objective, partition: GroupPartition
) -> FittedModel:
    """Refit of the active set recorded after iteration ``t`` (t=0: null model)."""
    if not 0 <= t <= len(path.snapshots):
        raise RangeError(f"iteration {t} outside [0, {len(path.snapshots)}]")
    if t == 0:
        return FittedModel(
            coefficients=np.zeros(obj.p), active_groups=(), family=obj.family,
            diagnostics={"iteration": 0},
        )
    snap = path.snapshots[t - 1]
    report = restricted_minimize(obj, feature_set(partition, snap.active_groups))
    return FittedModel(
        coefficients=report.w,
        active_groups=snap.active_groups,
        family=obj.family,
        diagnostics={
            "iteration": t,
            "objective_value": report.objective_value,
            "gradient_norm_on_support": report.gradient_norm_on_support,
            "converged": report.converged,
        },
    )


def verify_path_invariants(
    obj: Objective,
    partition: GroupPartition,
    cfg: IgaConfig,
    path: SelectionPath,
) -> dict:
    """Replay a recorded path and check every step's invariants from scratch.

    Two passes.  First a fresh engine is driven with the recorded picks and
    must reproduce every event and snapshot bit for bit (replay determinism;
    a rejected pick means the record violates the candidate constraint).
    Then an independent refit pass rechecks the arithmetic of each event:
    positive add gains over the lambda-discounted floor (objective mode),
    removal costs strictly under half the level gain, off-support
    coefficients exactly zero, and the sweep exit condition at the end of
    every iteration.  Direct solves must match the snapshots exactly,
    iterative ones to solver tolerance.  Returns a report dict; raises
    EngineInvariantError on any violation.
    """
    replay = PathEngine(obj, partition, cfg)
    try:
        for ev in path.events:
            if ev.action == "add":
                replay.pick(ev.group)
    except PolicyError as exc:
        raise EngineInvariantError(f"recorded pick rejected on replay: {exc}") from exc
    replayed = replay.path()
    if len(replayed.events) != len(path.events):
        raise EngineInvariantError(
            f"replay produced {len(replayed.events)} events, record has {len(path.events)}"
        )
    for got, want in zip(replayed.events, path.events):
        same = (
            got.action == want.action and got.group == want.group
            and got.iteration == want.iteration
            and got.Q_after == want.Q_after and got.level_gain == want.level_gain
        )
        if not same:
            raise EngineInvariantError(f"replay diverged at iteration {want.iteration}")
    for got_s, want_s in zip(replayed.snapshots, path.snapshots):
        if got_s.active_groups != want_s.active_groups or not np.array_equal(
            got_s.coefficients, want_s.coefficients
        ):
            raise EngineInvariantError(f"replay snapshot mismatch at iteration {want_s.iteration}")
    if replayed.Q_initial != path.Q_initial:
        raise EngineInvariantError("replay Q_initial mismatch")
    natural = ("k_max", "all_groups_active", "score_floor")
    if path.finish_reason in natural and replayed.finish_reason != path.finish_reason:
        raise EngineInvariantError(
            f"replay finished with {replayed.finish_reason!r}, record says {path.finish_reason!r}"
        )

    Q0 = obj.value_from_linpred(np.zeros(obj.n))
    delta_floor = cfg.delta_floor if cfg.delta_floor is not None else 1e-10 * Q0
    slack = _FP_SLACK * (1.0 + abs(Q0))
    active: list[int] = []
    stack: list[float] = []
    w = np.zeros(obj.p)
    Q = Q0
    checked = 0
    by_iteration: dict[int, list[PathEvent]] = {}
    for ev in path.events:
        by_iteration.setdefault(ev.iteration, []).append(ev)
    for it in sorted(by_iteration):
        for ev in by_iteration[it]:
            start = w
            if ev.action == "add":
                if ev.group in active:
                    raise EngineInvariantError(f"add of already-active group {ev.group}")
                if obj.family != "gaussian":
                    # same seeding trick as the engine, from this pass's own
                    # iterate: Newton can stall below the single-group optimum
                    # on a cold start near separability
                    _, alpha = partial_increment(obj, w, ev.group, partition)
                    start = w.copy()
                    start[partition.groups[ev.group]] = alpha
                active.append(ev.group)
                stack.append(ev.level_gain)
                if ev.level_gain <= 0:
                    raise EngineInvariantError(f"non-positive add gain at iteration {it}")
                if (
                    cfg.scoring_mode == "objective_reduction"
                    and ev.level_gain < cfg.lam * delta_floor * (1 - cfg.tie_tolerance) - slack
                ):
                    raise EngineInvariantError(
                        f"add gain {ev.level_gain:.3e} under lambda*delta_floor at iteration {it}"
                    )
            else:
                # cost of removing this group from the pre-removal state
                idx = partition.groups[ev.group]
                z = obj.X @ w
                cost = (
                    obj.value_from_linpred(z - obj.X[:, idx] @ w[idx]) - Q
                )
                if cost >= stack[-1] / 2.0 + slack:
                    raise EngineInvariantError(
                        f"removal of group {ev.group} cost {cost:.3e} >= half level gain"
                    )
                stack.pop()
                active.remove(ev.group)
            # independent refit route: warm-started at this pass's own iterate,
            # not the engine's, so agreement is evidence and not tautology
            report = restricted_minimize(obj, feature_set(partition, active), warm_start=start)
            w, Q = report.w, report.objective_value
            off = np.setdiff1d(np.arange(obj.p), feature_set(partition, active))
            if off.size and np.any(w[off] != 0.0):
                raise EngineInvariantError("off-support coefficient not exactly zero")
            if abs(Q - ev.Q_after) > 1e-7 * (1.0 + abs(Q)):
                raise EngineInvariantError(
                    f"recorded Q_after {ev.Q_after!r} differs from replayed {Q!r}"
                )
            checked += 1
        # sweep exit condition at the end of the iteration
        if cfg.backward and active:
            z = obj.X @ w
            for g in active:
                idx = partition.groups[g]
                cost = obj.value_from_linpred(z - obj.X[:, idx] @ w[idx]) - Q
                if cost < stack[-1] / 2.0 - 1e-12 * (1.0 + abs(Q)) - slack:
                    raise EngineInvariantError(
                        f"sweep exited while group {g} removal cost {cost:.3e} "
                        f"was below half level gain at iteration {it}"
                    )
        snap = path.snapshots[it - 1]
        if tuple(sorted(active)) != snap.active_groups:
            raise EngineInvariantError(f"snapshot active set mismatch at iteration {it}")
        if obj.family == "gaussian":
            # the restricted solve is direct, so any warm start lands on the
            # same point bit for bit
            reproduced = np.array_equal(w, snap.coefficients)
        else:
            reproduced = np.allclose(w, snap.coefficients, rtol=1e-6, atol=1e-8)
        if not reproduced:
            raise EngineInvariantError(f"snapshot coefficients not reproducible at iteration {it}")
    return {"events_checked": checked, "iterations": len(path.snapshots)}


def path_to_dict(path: SelectionPath) -> dict:
    """JSON-ready path document; group ids one-based for display."""
    return {
        "events": [
            {
                "action": e.action,
                "group": e.group + 1,
                "Q_after": e.Q_after,
                "level_gain": e.level_gain,
                "iteration": e.iteration,
            }
            for e in path.events
        ],
        "snapshots": [
            {
                "iteration": s.iteration,
                "active_groups": [g + 1 for g in s.active_groups],
                "coefficients": [float(c) for c in s.coefficients],
            }
            for s in path.snapshots
        ],
        "Q_initial": path.Q_initial,
        "finish_reason": path.finish_reason,
    }
