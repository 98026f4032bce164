"""Path engine: candidate sets, forward/backward moves, invariants, replay."""

import numpy as np
import pytest

from groupsel.criterion import make_dataset, make_objective, standardize
from groupsel.engine import (
    GREEDY,
    Candidate,
    IgaConfig,
    PathEngine,
    SelectionPolicy,
    candidate_set,
    forward_step,
    path_to_dict,
    priority_policy,
    run_path,
    state_at_iteration,
    verify_path_invariants,
)
from groupsel.errors import NoCandidates, PolicyError, RangeError
from groupsel.groups import validate_partition
from groupsel.rng import child_rng
from groupsel.simulate import SimSpec, generate


# -- oracles ----------------------------------------------------------------

def brute_gain(obj, w, g, partition):
    """Partial forward gain via an independent least-squares route."""
    idx = partition.groups[g]
    r = obj.y - obj.X @ w
    beta, *_ = np.linalg.lstsq(obj.X[:, idx], r, rcond=None)
    fitted = r - obj.X[:, idx] @ beta
    return (r @ r - fitted @ fitted) / (2.0 * obj.n)


def scored_objective(gains, n=3):
    """Gaussian data on an orthogonal design with prescribed singleton gains."""
    gains = np.asarray(gains, dtype=float)
    p = gains.size
    X = np.zeros((p, p))
    np.fill_diagonal(X, np.sqrt(p))
    y = np.sqrt(2.0 * p * gains)  # gain_j = y_j^2 / (2p) on this design
    return make_objective("gaussian", make_dataset(X, y))


def heuristic_objective(seed):
    inst = generate(SimSpec(case="heuristic", n=400, seed=seed))
    obj = make_objective("gaussian", standardize(inst.dataset))
    return obj, inst.partition


# -- candidate set ----------------------------------------------------------

def test_candidate_order_and_top_only_at_lam_1():
    obj = scored_objective([5.0, 3.0, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    cands = candidate_set(obj, np.zeros(3), [], IgaConfig(lam=1.0), part)
    assert [c.group for c in cands] == [0, 1, 2]
    assert np.allclose([c.score for c in cands], [5.0, 3.0, 1.0])
    assert [c.in_A_lambda for c in cands] == [True, False, False]


def test_candidate_set_at_lam_half():
    obj = scored_objective([5.0, 3.0, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    cands = candidate_set(obj, np.zeros(3), [], IgaConfig(lam=0.5), part)
    assert [c.in_A_lambda for c in cands] == [True, True, False]  # 3.0 >= 2.5


def test_candidate_ties_break_on_lower_index():
    obj = scored_objective([2.0, 5.0, 5.0])
    part = validate_partition([[0], [1], [2]], p=3)
    cands = candidate_set(obj, np.zeros(3), [], IgaConfig(), part)
    assert [c.group for c in cands[:2]] == [1, 2]


def test_candidate_scores_match_brute_force():
    part = validate_partition([[0, 1], [2, 3], [4, 5]], p=6)
    rng = child_rng(0, 21)
    X = rng.standard_normal((40, 6))
    y = rng.standard_normal(40)
    obj = make_objective("gaussian", make_dataset(X, y))
    w = np.zeros(6)
    cands = candidate_set(obj, w, [], IgaConfig(), part)
    for c in cands:
        assert c.score == pytest.approx(brute_gain(obj, w, c.group, part), abs=1e-12)


def test_candidate_dual_route_workspace_free():
    # the engine's batched scorer and the loop fallback must agree
    part = validate_partition([[0, 1, 2], [3, 4], [5]], p=6)  # unequal sizes
    rng = child_rng(1, 21)
    X = rng.standard_normal((30, 6))
    y = rng.standard_normal(30)
    obj = make_objective("gaussian", make_dataset(X, y))
    cands = candidate_set(obj, np.zeros(6), [1], IgaConfig(), part)
    assert {c.group for c in cands} == {0, 2}
    for c in cands:
        assert c.score == pytest.approx(brute_gain(obj, np.zeros(6), c.group, part), abs=1e-12)


def test_all_active_raises():
    obj = scored_objective([1.0, 1.0])
    part = validate_partition([[0], [1]], p=2)
    with pytest.raises(NoCandidates):
        candidate_set(obj, np.zeros(2), [0, 1], IgaConfig(), part)


def test_gradient_mode_ranking_matches_gain_on_orthonormal():
    # on X'X/n = I the exact gain is half the squared group gradient norm,
    # so both scoring modes must rank identically
    rng = child_rng(2, 21)
    for seed in range(10):
        rng = child_rng(seed, 22)
        A = rng.standard_normal((50, 8))
        Qmat, _ = np.linalg.qr(A)
        X = Qmat * np.sqrt(50)
        y = rng.standard_normal(50)
        obj = make_objective("gaussian", make_dataset(X, y))
        part = validate_partition([[0, 1], [2, 3], [4, 5], [6, 7]], p=8)
        by_gain = candidate_set(obj, np.zeros(8), [], IgaConfig(), part)
        by_grad = candidate_set(
            obj, np.zeros(8), [], IgaConfig(scoring_mode="gradient_norm"), part
        )
        assert [c.group for c in by_gain] == [c.group for c in by_grad]
        for cg, cn in zip(by_gain, by_grad):
            assert cg.score == pytest.approx(cn.score**2 / 2.0, rel=1e-9)


# -- config validation ------------------------------------------------------

def test_config_rejects_bad_values():
    with pytest.raises(RangeError):
        IgaConfig(lam=0.0)
    with pytest.raises(RangeError):
        IgaConfig(lam=1.5)
    with pytest.raises(RangeError):
        IgaConfig(scoring_mode="magic")
    with pytest.raises(RangeError):
        IgaConfig(k_max=0)
    with pytest.raises(RangeError):
        SelectionPolicy(kind="interactive")


# -- decoy-correction scenario ----------------------------------------------

def test_forward_only_picks_decoy_first():
    obj, part = heuristic_objective(seed=0)
    path = run_path(obj, part, IgaConfig(lam=1.0, backward=False))
    assert path.events[0].action == "add"
    assert path.events[0].group == 2  # the noisy-sum decoy wins the first pick
    assert all(e.action == "add" for e in path.events)


def test_full_path_removes_decoy():
    obj, part = heuristic_objective(seed=0)
    path = run_path(obj, part, IgaConfig(lam=1.0))
    signed = path.signed_sequence()
    assert -3 in signed  # one-based display of the removal
    removals = [e for e in path.events if e.action == "remove"]
    assert removals[0].group == 2  # first correction drops the decoy
    # once the decoy is dropped both true groups are already active
    it = removals[0].iteration
    snap = next(s for s in path.snapshots if s.iteration == it)
    assert {0, 1} <= set(snap.active_groups)
    assert 2 not in snap.active_groups


def test_path_determinism():
    obj, part = heuristic_objective(seed=3)
    p1 = run_path(obj, part, IgaConfig(lam=1.0))
    p2 = run_path(obj, part, IgaConfig(lam=1.0))
    assert p1.signed_sequence() == p2.signed_sequence()
    assert [e.Q_after for e in p1.events] == [e.Q_after for e in p2.events]
    for s1, s2 in zip(p1.snapshots, p2.snapshots):
        assert np.array_equal(s1.coefficients, s2.coefficients)


def test_redundant_group_eliminated_by_backward_sweep():
    # a group that is (almost) a sum of two others enters first and is removed
    # once both originals are active; forward-only keeps it
    obj, part = heuristic_objective(seed=1)
    full = run_path(obj, part, IgaConfig(lam=1.0))
    fwd = run_path(obj, part, IgaConfig(lam=1.0, backward=False))
    assert any(e.action == "remove" for e in full.events)
    assert not any(e.action == "remove" for e in fwd.events)


def test_no_removal_when_cost_high():
    # single strong group: its removal cost always exceeds half its own gain
    rng = child_rng(4, 23)
    X = rng.standard_normal((50, 2))
    y = X @ np.array([1.0, 1.0]) + 0.1 * rng.standard_normal(50)
    obj = make_objective("gaussian", make_dataset(X, y))
    part = validate_partition([[0, 1]], p=2)
    # k_max above m so exhausting the groups is what stops the path
    path = run_path(obj, part, IgaConfig(k_max=3))
    assert [e.action for e in path.events] == ["add"]
    assert path.finish_reason == "all_groups_active"


# -- invariants -------------------------------------------------------------

def test_verify_path_invariants_on_random_instances():
    part = validate_partition([[0, 1], [2, 3], [4, 5], [6, 7]], p=8)
    for seed in range(8):
        rng = child_rng(seed, 24)
        X = rng.standard_normal((60, 8))
        w_true = np.zeros(8)
        w_true[:4] = rng.standard_normal(4)
        y = X @ w_true + 0.5 * rng.standard_normal(60)
        obj = make_objective("gaussian", make_dataset(X, y))
        cfg = IgaConfig(lam=1.0)
        report = verify_path_invariants(obj, part, cfg, run_path(obj, part, cfg))
        assert report["events_checked"] > 0


def test_delta_stack_semantics():
    # adds push their realized gain, removals pop the top; replaying the
    # events through a shadow stack must reproduce the engine's stack
    obj, part = heuristic_objective(seed=0)
    eng = PathEngine(obj, part, IgaConfig(lam=1.0))
    shadow = []
    while not eng.finished:
        for e in eng.pick(eng.candidates[0].group):
            if e.action == "add":
                assert e.level_gain > 0
                shadow.append(e.level_gain)
            else:
                assert shadow.pop() == e.level_gain
        assert shadow == eng.delta_stack
        assert len(eng.delta_stack) == len(eng.active)
    assert any(e.action == "remove" for e in eng.events)


def test_off_support_coefficients_bit_zero():
    obj, part = heuristic_objective(seed=2)
    path = run_path(obj, part, IgaConfig(lam=1.0))
    for snap in path.snapshots:
        on = set()
        for g in snap.active_groups:
            on.update(part.groups[g].tolist())
        off = [j for j in range(part.p) if j not in on]
        assert np.all(snap.coefficients[off] == 0.0)


# -- picks, policies, termination -------------------------------------------

def test_pick_outside_candidate_set_rejected():
    obj = scored_objective([5.0, 3.0, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    eng = PathEngine(obj, part, IgaConfig(lam=1.0))
    state_before = (list(eng.active), eng.Q, eng.iteration)
    with pytest.raises(PolicyError):
        eng.pick(1)  # score 3 < 5, not in A_lambda at lam=1
    assert (list(eng.active), eng.Q, eng.iteration) == state_before
    with pytest.raises(PolicyError):
        eng.pick(7)


def test_pick_after_finish_rejected():
    obj = scored_objective([5.0])
    part = validate_partition([[0]], p=1)
    eng = PathEngine(obj, part, IgaConfig())
    eng.pick(0)
    assert eng.finished
    with pytest.raises(PolicyError):
        eng.pick(0)


def test_priority_policy_prefers_listed_member():
    obj = scored_objective([5.0, 3.0, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    # group 1 is in A_lambda at lam=0.5 and listed: picked over the argmax
    pol = priority_policy([1])
    eng = PathEngine(obj, part, IgaConfig(lam=0.5))
    forward_step(eng, pol)
    assert eng.active[0] == 1


def test_priority_policy_falls_back_to_greedy():
    obj = scored_objective([5.0, 3.0, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    pol = priority_policy([2])  # group 2 outside A_lambda at lam=0.5
    eng = PathEngine(obj, part, IgaConfig(lam=0.5))
    forward_step(eng, pol)
    assert eng.active[0] == 0


def test_interactive_policy_chooser():
    obj = scored_objective([5.0, 4.9, 1.0])
    part = validate_partition([[0], [1], [2]], p=3)
    pol = SelectionPolicy(
        kind="interactive",
        chooser=lambda cands: max(c.group for c in cands if c.in_A_lambda),
    )
    eng = PathEngine(obj, part, IgaConfig(lam=0.9))
    forward_step(eng, pol)
    assert eng.active[0] == 1


def test_zero_design_terminates_immediately():
    obj = make_objective("gaussian", make_dataset(np.zeros((5, 4)), np.ones(5)))
    part = validate_partition([[0, 1], [2, 3]], p=4)
    path = run_path(obj, part, IgaConfig())
    assert path.events == []
    assert path.finish_reason == "score_floor"


def test_k_max_termination():
    rng = child_rng(5, 25)
    X = rng.standard_normal((60, 8))
    y = X @ rng.standard_normal(8)
    obj = make_objective("gaussian", make_dataset(X, y))
    part = validate_partition([[0, 1], [2, 3], [4, 5], [6, 7]], p=8)
    path = run_path(obj, part, IgaConfig(k_max=2))
    assert path.finish_reason == "k_max"
    assert len(path.final_active()) == 2


def test_k_max_default_resolution():
    obj = scored_objective([1.0, 2.0], n=2)
    part = validate_partition([[0], [1]], p=2)
    eng = PathEngine(obj, part, IgaConfig())
    assert eng.k_max == min(part.m, int(obj.n / (obj.p / part.m)))


def test_auto_and_halt():
    obj, part = heuristic_objective(seed=0)
    eng = PathEngine(obj, part, IgaConfig(lam=1.0))
    assert eng.auto(0) == []
    events = eng.auto(2)
    assert len([e for e in events if e.action == "add"]) == 2
    eng.halt("operator_done")
    assert eng.finished and eng.finish_reason == "operator_done"
    assert eng.auto(5) == []


def test_state_at_iteration_endpoints():
    obj, part = heuristic_objective(seed=0)
    path = run_path(obj, part, IgaConfig(lam=1.0))
    null = state_at_iteration(path, 0, obj, part)
    assert np.all(null.coefficients == 0.0) and null.active_groups == ()
    last = state_at_iteration(path, len(path.snapshots), obj, part)
    assert last.active_groups == path.snapshots[-1].active_groups
    assert np.allclose(last.coefficients, path.snapshots[-1].coefficients, atol=1e-12)
    with pytest.raises(RangeError):
        state_at_iteration(path, len(path.snapshots) + 1, obj, part)


def test_gradient_mode_runs_and_verifies():
    obj, part = heuristic_objective(seed=0)
    cfg = IgaConfig(lam=1.0, scoring_mode="gradient_norm")
    path = run_path(obj, part, cfg)
    assert len(path.events) > 0
    report = verify_path_invariants(obj, part, cfg, path)
    assert report["events_checked"] == len(path.events)


def test_path_to_dict_one_based():
    obj, part = heuristic_objective(seed=0)
    path = run_path(obj, part, IgaConfig(lam=1.0))
    doc = path_to_dict(path)
    assert doc["events"][0]["group"] == 3  # zero-based group 2
    assert min(e["group"] for e in doc["events"]) >= 1
    assert doc["finish_reason"] == path.finish_reason
