import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ridge_oracle
from rbfn.dataset import FeatureMatrix, LabelVector, Scaler
from rbfn.rbfnet import (
    KernelConfig,
    RbfModel,
    SingularSystemError,
    TrainConfig,
    compute_spreads,
    fit_output_weights,
    forward,
    gaussian_kernel,
    hidden_activations,
    one_se_choice,
    predict,
    predict_proba,
    scores_to_proba,
    select_hidden_size,
    train,
)


def _model(centers, spreads, weights, mode="scalar", n_classes=None):
    centers = np.atleast_2d(np.asarray(centers, float))
    weights = np.asarray(weights, float)
    L = weights.shape[1]
    d = centers.shape[1]
    return RbfModel(
        centers=centers,
        spreads=spreads,
        weights=weights,
        class_names=tuple(f"c{i}" for i in range(L)),
        scaler=Scaler(np.zeros(d), np.ones(d)),
        kernel=KernelConfig(spread_mode=mode),
    )


# ---------------------------------------------------------------- kernel


def test_kernel_values():
    assert gaussian_kernel(0.0, 3.7) == 1.0
    assert gaussian_kernel(2.0, 2.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert gaussian_kernel(10.0, 1.0) < 1e-12


@pytest.mark.parametrize("sigma", [0.0, -1.0])
def test_kernel_rejects_bad_sigma(sigma):
    with pytest.raises(ValueError):
        gaussian_kernel(1.0, sigma)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 50), st.floats(0, 50), st.floats(0.05, 20))
def test_kernel_shape(r1, r2, sigma):
    k1, k2 = gaussian_kernel(r1, sigma), gaussian_kernel(r2, sigma)
    assert 0 <= k1 <= 1
    if r1 < 8 * sigma:
        assert k1 > 0
    # strictness only where float64 can resolve the difference
    if r2 - r1 > 1e-6 * sigma and k2 > 1e-300:
        assert k1 > k2
    if r1 > 1e-6 * sigma:
        assert k1 < 1


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_scalar_activation_radial(seed):
    rng = np.random.default_rng(seed)
    mu = rng.standard_normal(3)
    x = rng.standard_normal(3)
    # a rotation about mu keeps the distance
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    x2 = mu + q @ (x - mu)
    model = _model([mu], [1.3], np.zeros((2, 2)))
    assert hidden_activations(model, x)[0] == pytest.approx(hidden_activations(model, x2)[0], rel=1e-12)


def test_activation_at_center():
    model = _model([[1.0, 2.0], [0.0, 0.0]], [0.5, 0.5], np.zeros((3, 2)))
    assert hidden_activations(model, np.array([1.0, 2.0]))[0] == 1.0


def test_activation_closed_form():
    model = _model([[0.0, 0.0]], [1.0], np.zeros((2, 2)))
    z = hidden_activations(model, np.array([3.0, 4.0]))
    assert z[0] == pytest.approx(math.exp(-12.5), rel=1e-14)
    assert z[0] == pytest.approx(3.727e-6, rel=1e-3)


def test_per_dimension_activation():
    model = _model([[0.0, 0.0]], [[1.0, 2.0]], np.zeros((2, 2)), mode="per_dimension")
    assert hidden_activations(model, np.array([1.0, 2.0]))[0] == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_activation_dimension_mismatch():
    model = _model([[0.0, 0.0]], [1.0], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        hidden_activations(model, np.zeros(3))


# ---------------------------------------------------------------- forward / proba


def test_forward_zero_weights():
    model = _model([[0.0]], [1.0], np.zeros((2, 3)))
    np.testing.assert_array_equal(forward(model, np.array([0.4])), np.zeros(3))


def test_forward_single_term():
    model = _model([[0.0]], [1.0], [[0.2, 0.0], [0.5, 0.0]])
    assert forward(model, np.array([0.0]))[0] == pytest.approx(0.7, abs=1e-15)


def test_forward_matches_dot_products(rng):
    J, d, L = 4, 3, 3
    centers = rng.standard_normal((J, d))
    spreads = rng.uniform(0.5, 2, J)
    weights = rng.standard_normal((J + 1, L))
    model = _model(centers, spreads, weights)
    x = rng.standard_normal(d)
    for l in range(L):
        total = weights[0, l]
        for j in range(J):
            dist = math.sqrt(sum((x[i] - centers[j, i]) ** 2 for i in range(d)))
            total += weights[j + 1, l] * math.exp(-dist**2 / (2 * spreads[j] ** 2))
        assert forward(model, x)[l] == pytest.approx(total, abs=1e-12)


def test_forward_linear_in_weights(rng):
    centers, spreads = rng.standard_normal((3, 2)), np.ones(3)
    w1, w2 = rng.standard_normal((4, 2)), rng.standard_normal((4, 2))
    x = rng.standard_normal(2)
    f = lambda w: forward(_model(centers, spreads, w), x)
    np.testing.assert_allclose(f(w1 + w2), f(w1) + f(w2), atol=1e-12)


@pytest.mark.parametrize(
    "scores, expected",
    [((0.8, 0.2), (0.8, 0.2)), ((-1, -2), (0.5, 0.5)), ((2, 1, 1), (0.5, 0.25, 0.25))],
)
def test_scores_to_proba(scores, expected):
    np.testing.assert_allclose(scores_to_proba(np.array(scores, float)), expected, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6), st.floats(1e-3, 1e3))
def test_proba_is_distribution_and_scale_invariant(scores, c):
    s = np.array(scores)
    p = scores_to_proba(s)
    assert abs(p.sum() - 1) <= 1e-12
    assert np.all((p >= 0) & (p <= 1))
    assert np.argmax(scores_to_proba(c * s)) == np.argmax(p)


def test_predict_tie_goes_low():
    # constant scores via bias only
    model = _model([[0.0]], [1.0], [[0.5, 0.5], [0.0, 0.0]])
    np.testing.assert_allclose(predict_proba(model, np.array([3.0])), [0.5, 0.5])
    assert predict(model, np.array([3.0])) == 0
    assert predict(_model([[0.0]], [1.0], [[0.9, 0.1], [0.0, 0.0]]), np.array([0.0])) == 0


# ---------------------------------------------------------------- spreads


def test_spread_rms():
    s = compute_spreads(np.array([[1.0]]), np.array([0, 0]), np.array([[0.0], [2.0]]))
    assert s[0] == pytest.approx(1.0)


def test_spread_singleton_fallback():
    centers = np.array([[0.0], [4.0]])
    pts = np.array([[0.0], [3.0], [5.0]])
    s = compute_spreads(centers, np.array([0, 1, 1]), pts)
    assert s[0] == pytest.approx(4.0 / math.sqrt(4))
    assert s[1] == pytest.approx(1.0)


def test_spread_fallback_capped_by_nearest_center():
    centers = np.array([[0.0], [0.1], [10.0]])
    s = compute_spreads(centers, np.array([0, 1, 2]), centers)
    shared = 10.0 / math.sqrt(6)
    np.testing.assert_allclose(s, [0.1, 0.1, shared])


def test_spread_identical_centers():
    centers = np.zeros((3, 2))
    s = compute_spreads(centers, np.array([0, 1, 2]), np.zeros((3, 2)))
    np.testing.assert_array_equal(s, [1.0, 1.0, 1.0])


def test_spread_per_dimension():
    centers = np.array([[0.0, 0.0], [10.0, 10.0]])
    pts = np.array([[-1.0, 0.0], [1.0, 0.0], [10.0, 10.0]])
    s = compute_spreads(centers, np.array([0, 0, 1]), pts, "per_dimension")
    fb = math.sqrt(200) / 2
    np.testing.assert_allclose(s, [[1.0, fb], [fb, fb]])


# ---------------------------------------------------------------- output weights


def test_identity_design():
    t = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(fit_output_weights(np.eye(3), t, 0.0), t, atol=1e-14)


def test_zero_targets():
    phi = np.hstack([np.ones((5, 1)), np.random.default_rng(0).random((5, 2))])
    for lam in (0.0, 1e-3, 10.0):
        np.testing.assert_array_equal(fit_output_weights(phi, np.zeros((5, 2)), lam), 0.0)


def test_singular_without_ridge():
    phi = np.ones((4, 2))
    with pytest.raises(SingularSystemError, match="lambda"):
        fit_output_weights(phi, np.ones((4, 1)), 0.0)
    fit_output_weights(phi, np.ones((4, 1)), 1e-6)


def test_matches_ridge_oracle(rng):
    phi = rng.standard_normal((6, 3))
    t = rng.standard_normal((6, 2))
    expected = np.array(ridge_oracle(phi.tolist(), t.tolist(), 1e-3))
    assert np.max(np.abs(fit_output_weights(phi, t, 1e-3) - expected)) <= 1e-8


# ---------------------------------------------------------------- training


def test_fixture_interpolation(fixture_xy):
    m, y = fixture_xy
    model = train(m, y, TrainConfig(n_hidden=10, lam=1e-8))
    np.testing.assert_array_equal(predict(model, m.values), y.indices)
    # patient A
    assert model.class_names[predict(model, m.values[0])] == ">75%"


def test_two_points():
    m = FeatureMatrix(np.array([[0.0, 1.0], [3.0, -1.0]]), ("a", "b"))
    y = LabelVector(np.array([1, 0]), ("n", "p"))
    model = train(m, y, TrainConfig(n_hidden=2))
    np.testing.assert_array_equal(predict(model, m.values), [1, 0])


@pytest.mark.parametrize("strategy", ["kmeans", "random_subset"])
@pytest.mark.parametrize("mode", ["scalar", "per_dimension"])
def test_train_deterministic(fixture_xy, strategy, mode):
    m, y = fixture_xy
    cfg = TrainConfig(n_hidden=4, center_strategy=strategy, spread_mode=mode, seed=3)
    a, b = train(m, y, cfg), train(m, y, cfg)
    for field in ("centers", "spreads", "weights"):
        assert getattr(a, field).tobytes() == getattr(b, field).tobytes()


def test_train_rejects_too_many_units(fixture_xy):
    m, y = fixture_xy
    with pytest.raises(ValueError):
        train(m, y, TrainConfig(n_hidden=11))


# ---------------------------------------------------------------- hidden size


def test_singleton_grid(fixture_xy):
    m, y = fixture_xy
    assert select_hidden_size(m, y, [3], folds=2, seed=0).chosen == 3


def test_one_se_rule_prefers_smaller():
    assert one_se_choice([(4, 0.8, 0.0), (2, 0.8, 0.0)]) == 2
    assert one_se_choice([(2, 0.70, 0.05), (8, 0.74, 0.05)]) == 2
    assert one_se_choice([(2, 0.60, 0.05), (8, 0.74, 0.05)]) == 8


def test_fixture_grid(fixture_xy):
    m, y = fixture_xy
    sel = select_hidden_size(m, y, [2, 4, 8], folds=5, seed=0)
    assert sel.chosen in (2, 4, 8)
    assert [row[0] for row in sel.table] == [2, 4, 8]
    assert all(len(row[3]) == 5 for row in sel.table)
    again = select_hidden_size(m, y, [2, 4, 8], folds=5, seed=0)
    assert again == sel


def test_empty_grid(fixture_xy):
    with pytest.raises(ValueError, match="empty"):
        select_hidden_size(*fixture_xy, [], folds=2)


def test_grid_too_large(fixture_xy):
    with pytest.raises(ValueError, match="exceed"):
        select_hidden_size(*fixture_xy, [9], folds=5)
