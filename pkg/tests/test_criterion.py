"""Objective values/gradients, restricted solves, and forward gains.

Gradient correctness is checked against a central finite-difference oracle
written independently of the analytic formulas; restricted solves against
normal equations and a brute-force grid where feasible.
"""

import numpy as np
import pytest

from groupsel.criterion import (
    Dataset,
    Objective,
    forward_gain,
    make_dataset,
    make_objective,
    partial_increment,
    restricted_minimize,
    sigmoid,
    softplus,
    standardize,
)
from groupsel.errors import DimensionError, FamilyError, ZeroColumnError
from groupsel.groups import validate_partition
from groupsel.rng import child_rng

ROOT2 = np.sqrt(2.0)


# -- oracles ----------------------------------------------------------------

def fd_gradient(f, w, h=1e-6):
    """Central finite differences, coordinate by coordinate."""
    w = np.asarray(w, dtype=float)
    g = np.zeros_like(w)
    for j in range(w.size):
        e = np.zeros_like(w)
        e[j] = h
        g[j] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def random_objective(family, n, p, seed):
    rng = child_rng(seed, 1234)
    X = rng.standard_normal((n, p))
    if family == "gaussian":
        y = rng.standard_normal(n)
    else:
        y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return make_objective(family, make_dataset(X, y))


# -- scalar links -----------------------------------------------------------

def test_softplus_matches_naive_in_safe_range():
    u = np.linspace(-30, 30, 101)
    assert np.allclose(softplus(u), np.log1p(np.exp(u)), rtol=1e-12)


def test_softplus_large_argument_no_overflow():
    u = np.array([500.0, 1e4])
    out = softplus(u)
    assert np.all(np.isfinite(out))
    assert np.allclose(out, u)  # asymptote
    assert softplus(np.array([-800.0]))[0] == 0.0


def test_sigmoid_stable_and_symmetric():
    u = np.array([-800.0, -30.0, 0.0, 30.0, 800.0])
    s = sigmoid(u)
    assert np.all(np.isfinite(s))
    assert s[2] == 0.5
    assert np.allclose(s + sigmoid(-u), 1.0)


# -- values -----------------------------------------------------------------

def test_gaussian_value_example():
    X = np.array([[ROOT2, 0.0], [0.0, ROOT2]])
    obj = make_objective("gaussian", make_dataset(X, np.array([2.0, 0.0])))
    assert obj.value(np.zeros(2)) == pytest.approx(1.0)


def test_logistic_value_at_zero_is_log2():
    obj = random_objective("logistic", 17, 3, seed=0)
    assert obj.value(np.zeros(3)) == pytest.approx(np.log(2.0), abs=1e-12)


def test_gaussian_perfect_fit_zero():
    rng = child_rng(3, 1234)
    X = rng.standard_normal((10, 4))
    w = rng.standard_normal(4)
    obj = make_objective("gaussian", make_dataset(X, X @ w))
    assert obj.value(w) == pytest.approx(0.0, abs=1e-25)


def test_make_objective_validates():
    ds = make_dataset(np.eye(2), np.array([0.5, 1.0]))
    with pytest.raises(FamilyError):
        make_objective("poisson", ds)
    with pytest.raises(DimensionError):
        make_objective("logistic", ds)  # labels not in {-1,+1}


# -- gradients --------------------------------------------------------------

def test_gaussian_gradient_example():
    X = np.array([[ROOT2, 0.0], [0.0, ROOT2]])
    obj = make_objective("gaussian", make_dataset(X, np.array([2.0, 0.0])))
    assert np.allclose(obj.gradient(np.zeros(2)), [-ROOT2, 0.0])


def test_logistic_gradient_at_zero():
    obj = random_objective("logistic", 23, 4, seed=1)
    expect = obj.X.T @ (-obj.y / 2.0) / obj.n
    assert np.allclose(obj.gradient(np.zeros(4)), expect, atol=1e-14)


def test_gradient_zero_at_orthogonal_residual():
    # residual orthogonal to a column -> zero gradient entry there
    X = np.array([[1.0, 1.0], [-1.0, 1.0], [0.0, 2.0]])
    y = np.array([1.0, 1.0, 0.0])  # orthogonal to column 0
    obj = make_objective("gaussian", make_dataset(X, y))
    assert obj.gradient(np.zeros(2))[0] == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("family", ["gaussian", "logistic"])
def test_gradient_matches_finite_differences(family):
    # acceptance-grade sweep lives in test_acceptance; this is the unit version
    for seed in range(10):
        obj = random_objective(family, 40, 6, seed=seed)
        w = child_rng(seed, 77).standard_normal(6) * 0.8
        g = obj.gradient(w)
        g0 = fd_gradient(obj.value, w)
        assert np.linalg.norm(g - g0) <= 1e-5 * max(1.0, np.linalg.norm(g0))


# -- dataset plumbing -------------------------------------------------------

def test_standardize_columns_to_sqrt_n():
    # already at norm sqrt(n): untouched
    ds = standardize(make_dataset(np.ones((4, 1)), np.zeros(4)))
    assert np.allclose(ds.X, 1.0)
    assert np.allclose(ds.column_scales, 1.0)
    ds2 = standardize(make_dataset(np.array([[2.0], [0.0], [0.0], [0.0]]), np.zeros(4)))
    assert np.allclose(ds2.X[:, 0], [2, 0, 0, 0])


def test_standardize_rejects_zero_column():
    with pytest.raises(ZeroColumnError):
        standardize(make_dataset(np.array([[1.0, 0.0], [2.0, 0.0]]), np.zeros(2)))


def test_standardize_scale_round_trip():
    rng = child_rng(5, 1234)
    X = rng.standard_normal((30, 4)) * np.array([0.2, 1.0, 5.0, 40.0])
    ds = standardize(make_dataset(X, np.zeros(30)))
    assert np.allclose(np.linalg.norm(ds.X, axis=0), np.sqrt(30))
    # w_raw = scales * w_std reproduces predictions
    w_std = rng.standard_normal(4)
    assert np.allclose(ds.X @ w_std, X @ (ds.column_scales * w_std))


def test_make_dataset_validates_shapes():
    with pytest.raises(DimensionError):
        make_dataset(np.zeros((3, 2)), np.zeros(4))


# -- restricted minimize ----------------------------------------------------

def test_restricted_normal_equations_example():
    X = np.array([[ROOT2, 0.0], [0.0, ROOT2]])
    obj = make_objective("gaussian", make_dataset(X, np.array([2.0, 3.0])))
    rep = restricted_minimize(obj, [0])
    assert np.allclose(rep.w, [ROOT2, 0.0])
    assert rep.w[1] == 0.0  # off-support bit-zero


def test_restricted_empty_support():
    obj = random_objective("gaussian", 12, 3, seed=2)
    rep = restricted_minimize(obj, [])
    assert np.all(rep.w == 0.0)
    assert rep.iterations == 0
    assert rep.objective_value == pytest.approx(obj.value(np.zeros(3)))


def test_restricted_matches_lstsq_oracle():
    for seed in range(8):
        obj = random_objective("gaussian", 50, 8, seed=seed)
        sup = sorted(child_rng(seed, 9).choice(8, size=4, replace=False))
        rep = restricted_minimize(obj, sup)
        w_oracle, *_ = np.linalg.lstsq(obj.X[:, sup], obj.y, rcond=None)
        assert np.allclose(rep.w[sup], w_oracle, atol=1e-9)
        off = np.setdiff1d(np.arange(8), sup)
        assert np.all(rep.w[off] == 0.0)


def test_restricted_logistic_stationary():
    for seed in range(5):
        obj = random_objective("logistic", 60, 6, seed=seed)
        rep = restricted_minimize(obj, [0, 2, 5])
        g = obj.gradient(rep.w)
        assert np.linalg.norm(g[[0, 2, 5]]) <= 1e-7
        assert rep.converged


def test_restricted_logistic_separable_capped():
    # one feature perfectly separates the labels: argmin unattained,
    # coefficients frozen at the cap and flagged
    x = np.linspace(-1, 1, 20)
    y = np.sign(x + 1e-9)
    obj = make_objective("logistic", make_dataset(x[:, None], y))
    rep = restricted_minimize(obj, [0])
    assert rep.capped
    assert rep.converged
    assert np.max(np.abs(rep.w)) <= 30.0 + 1e-12


def test_restricted_never_worse_than_warm_start():
    for seed in range(5):
        obj = random_objective("logistic", 40, 5, seed=seed)
        start = child_rng(seed, 11).standard_normal(5) * 3.0
        rep = restricted_minimize(obj, range(5), warm_start=start)
        assert rep.objective_value <= obj.value(start) + 1e-12


def test_duplicate_support_indices_merged():
    obj = random_objective("gaussian", 20, 3, seed=4)
    rep1 = restricted_minimize(obj, [0, 1, 1, 0])
    rep2 = restricted_minimize(obj, [0, 1])
    assert np.allclose(rep1.w, rep2.w)


# -- forward gain -----------------------------------------------------------

def test_forward_gain_closed_form_example():
    X = np.array([[ROOT2, 0.0], [0.0, ROOT2]])
    obj = make_objective("gaussian", make_dataset(X, np.array([2.0, 0.0])))
    part = validate_partition([[0], [1]], p=2)
    assert forward_gain(obj, np.zeros(2), 0, part) == pytest.approx(1.0)


def test_forward_gain_stationary_group_zero():
    rng = child_rng(6, 1234)
    X = rng.standard_normal((30, 4))
    part = validate_partition([[0, 1], [2, 3]], p=4)
    obj = make_objective("gaussian", make_dataset(X, X[:, 2] - X[:, 3]))
    w_fit = restricted_minimize(obj, [2, 3]).w
    assert forward_gain(obj, w_fit, 1, part) == pytest.approx(0.0, abs=1e-20)


def test_forward_gain_matches_restricted_refit_from_empty():
    # gain from empty support equals the drop achieved by a full refit on F_g
    part = validate_partition([[0, 1], [2, 3], [4, 5]], p=6)
    for seed in range(6):
        obj = random_objective("gaussian", 40, 6, seed=seed)
        base = obj.value(np.zeros(6))
        for g in range(3):
            rep = restricted_minimize(obj, part.groups[g])
            gain = forward_gain(obj, np.zeros(6), g, part)
            assert gain == pytest.approx(base - rep.objective_value, abs=1e-12)


def test_forward_gain_logistic_brute_force():
    # oracle: dense grid over the 1-d group coefficient (labels overlap so the
    # minimizer is interior)
    x = np.array([-2.0, -1.0, 0.5, 1.2, 2.0, -0.3])
    y = np.array([-1.0, 1.0, -1.0, 1.0, 1.0, -1.0])
    obj = make_objective("logistic", make_dataset(x[:, None], y))
    part = validate_partition([[0]], p=1)
    base = obj.value(np.zeros(1))
    grid = np.linspace(-10, 10, 20001)
    vals = [obj.value(np.array([a])) for a in grid]
    oracle = base - min(vals)
    assert forward_gain(obj, np.zeros(1), 0, part) == pytest.approx(oracle, abs=1e-6)


def test_partial_increment_point_achieves_gain():
    part = validate_partition([[0, 1], [2, 3]], p=4)
    for family in ("gaussian", "logistic"):
        obj = random_objective(family, 50, 4, seed=8)
        w = np.zeros(4)
        gain, alpha = partial_increment(obj, w, 1, part, linpred=np.zeros(50))
        w2 = w.copy()
        w2[part.groups[1]] = alpha
        assert obj.value(w) - obj.value(w2) == pytest.approx(gain, abs=1e-10)


def test_forward_gain_linpred_shortcut_consistent():
    part = validate_partition([[0, 1], [2, 3]], p=4)
    obj = random_objective("gaussian", 25, 4, seed=9)
    w = child_rng(9, 13).standard_normal(4)
    z = obj.X @ w
    assert forward_gain(obj, w, 0, part, linpred=z) == pytest.approx(
        forward_gain(obj, w, 0, part)
    )
