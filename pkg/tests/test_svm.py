import math

import numpy as np
import pytest

from docclass import svm
from docclass._smo_fallback import smo_solve as smo_solve_py
from docclass.errors import (
    DegenerateTrainingError,
    DimensionMismatchError,
    ValidationError,
)
from docclass.svm import (
    BinarySvmModel,
    SmoConfig,
    StandardizationStats,
    kkt_violations,
    predict_binary,
    rbf_gram,
    rbf_kernel,
    solve_dual,
    train_binary,
)


def two_blobs(rng, n_per=40, gap=4.0, dim=3, spread=0.4):
    a = rng.normal(0.0, spread, (n_per, dim))
    b = rng.normal(gap, spread, (n_per, dim))
    X = np.vstack([a, b])
    y = np.r_[np.ones(n_per), -np.ones(n_per)]
    return X, y


class TestRbfKernel:
    def test_self_similarity_is_one(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(size=5)
            assert rbf_kernel(x, x, float(rng.uniform(0.1, 10))) == 1.0

    def test_unit_distance_values(self):
        assert rbf_kernel(np.zeros(1), np.ones(1), 1.0) == pytest.approx(
            math.exp(-0.5), rel=1e-15)
        x = np.array([0.0, 0.0])
        y = np.array([1.0, 1.0])   # squared distance 2
        assert rbf_kernel(x, y, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            x, y = rng.normal(size=(2, 4))
            s = float(rng.uniform(0.1, 5))
            assert rbf_kernel(x, y, s) == rbf_kernel(y, x, s)
            assert 0.0 < rbf_kernel(x, y, s) <= 1.0

    def test_invalid_inputs(self):
        with pytest.raises(DimensionMismatchError):
            rbf_kernel(np.zeros(2), np.zeros(3), 1.0)
        with pytest.raises(ValidationError):
            rbf_kernel(np.zeros(2), np.zeros(2), 0.0)


class TestRbfGram:
    def test_matches_pairwise_kernel(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(6, 3))
        K = rbf_gram(X, X, 0.7)
        for i in range(6):
            for j in range(6):
                assert K[i, j] == pytest.approx(rbf_kernel(X[i], X[j], 0.7),
                                                rel=1e-12)

    def test_positive_semidefinite(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            X = rng.normal(size=(15, 4))
            K = rbf_gram(X, X, float(rng.uniform(0.2, 5)))
            assert np.linalg.eigvalsh(K).min() > -1e-10
            assert np.allclose(np.diag(K), 1.0)


class TestTrainBinary:
    def test_separable_blobs_fit(self):
        rng = np.random.default_rng(4)
        X, y = two_blobs(rng)
        model = train_binary(X, y, sigma=2.0, box_c=1.0)
        preds = np.sign(model.decision_values(X))
        assert np.array_equal(preds, y)
        # dual equality constraint survives support-vector pruning
        assert abs(model.dual_coefs.sum()) < 1e-6

    def test_kkt_conditions_hold_at_tolerance(self):
        rng = np.random.default_rng(5)
        X, y = two_blobs(rng, gap=2.0, spread=0.8)
        cfg = SmoConfig()
        alpha, bias = solve_dual(X, y, 1.5, 1.0, cfg)
        K = rbf_gram(X, X, 1.5)
        decisions = K @ (alpha * y) + bias
        assert kkt_violations(alpha, y, decisions, 1.0).max() <= cfg.kkt_tol + 1e-9
        assert (alpha >= -1e-12).all() and (alpha <= 1.0 + 1e-12).all()

    def test_contradictory_duplicates_hit_the_box(self):
        X = np.array([[1.0, 1.0], [1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        y = np.array([1.0, -1.0, 1.0, -1.0])
        alpha, _ = solve_dual(X, y, 1.0, 1.0)
        # the duplicated contradictory pair cannot reach margin 1
        assert alpha[0] == pytest.approx(1.0, abs=1e-6)
        assert alpha[1] == pytest.approx(1.0, abs=1e-6)

    def test_single_class_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(DegenerateTrainingError):
            train_binary(X, np.ones(4), 1.0, 1.0)

    def test_validation_errors(self):
        X = np.zeros((4, 2))
        y = np.array([1.0, -1.0, 1.0, -1.0])
        with pytest.raises(ValidationError):
            train_binary(X, y[:3], 1.0, 1.0)
        with pytest.raises(ValidationError):
            train_binary(X, np.array([1.0, 2.0, -1.0, -1.0]), 1.0, 1.0)
        with pytest.raises(ValidationError):
            train_binary(X, y, -1.0, 1.0)
        with pytest.raises(ValidationError):
            train_binary(X, y, 1.0, 0.0)
        bad = X.copy()
        bad[0, 0] = np.inf
        with pytest.raises(ValidationError):
            train_binary(bad, y, 1.0, 1.0)

    def test_training_order_invariance(self):
        rng = np.random.default_rng(6)
        X, y = two_blobs(rng, n_per=25)
        probe = rng.normal(1.5, 1.0, (10, 3))
        tight = SmoConfig(kkt_tol=1e-10)
        ref = train_binary(X, y, 1.5, 10.0, tight).decision_values(probe)
        for seed in range(3):
            perm = np.random.default_rng(seed).permutation(y.size)
            model = train_binary(X[perm], y[perm], 1.5, 10.0, tight)
            assert np.allclose(model.decision_values(probe), ref, atol=1e-6)


class TestPrediction:
    def test_exact_zero_resolves_positive(self):
        model = BinarySvmModel(
            support_vectors=np.array([[1.0], [-1.0]]),
            dual_coefs=np.array([0.5, -0.5]),
            bias=0.0, sigma=1.0, box_c=1.0,
        )
        label, d = predict_binary(model, np.array([0.0]))
        assert d == 0.0
        assert label == 1
        assert model.predict(np.array([0.0])) == 1

    def test_far_point_decays_to_bias(self):
        rng = np.random.default_rng(7)
        X, y = two_blobs(rng)
        model = train_binary(X, y, 1.0, 1.0)
        d = model.decision_value(np.full(3, 1e4))
        assert d == pytest.approx(model.bias, abs=1e-12)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(8)
        X, y = two_blobs(rng)
        model = train_binary(X, y, 1.0, 1.0)
        with pytest.raises(DimensionMismatchError):
            model.decision_value(np.zeros(5))


class TestStandardization:
    def test_fit_apply_centers_and_scales(self):
        rng = np.random.default_rng(9)
        X = rng.normal(3.0, 5.0, (200, 4))
        Z = StandardizationStats.fit(X).apply(X)
        assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(Z.std(axis=0), 1.0, atol=1e-12)

    def test_constant_column_is_floored_not_nan(self):
        X = np.ones((10, 2))
        X[:, 1] = np.arange(10)
        Z = StandardizationStats.fit(X).apply(X)
        assert np.isfinite(Z).all()
        assert np.all(Z[:, 0] == 0.0)

    def test_dimension_checked(self):
        stats = StandardizationStats.fit(np.random.default_rng(10).normal(size=(5, 3)))
        with pytest.raises(DimensionMismatchError):
            stats.apply(np.zeros((2, 4)))


class TestBackends:
    def test_backend_reported(self):
        assert svm.SMO_BACKEND in ("cython", "python")

    def test_compiled_and_fallback_agree(self):
        rng = np.random.default_rng(11)
        for trial in range(5):
            X, y = two_blobs(rng, n_per=20, gap=2.0, spread=0.9)
            K = rbf_gram(X, X, 1.2)
            a1, b1, it1, gap1 = svm._smo_impl.smo_solve(K, y, 1.0, 1e-3, 10_000)
            a2, b2, it2, gap2 = smo_solve_py(K, y, 1.0, 1e-3, 10_000)
            assert it1 == it2
            assert np.allclose(np.asarray(a1), np.asarray(a2), atol=1e-10)
            assert b1 == pytest.approx(b2, abs=1e-10)

    def test_iteration_cap_respected(self):
        rng = np.random.default_rng(12)
        X, y = two_blobs(rng, n_per=30, gap=0.1, spread=2.0)
        K = rbf_gram(X, X, 0.5)
        _, _, n_iter, _ = svm._smo_impl.smo_solve(K, y, 100.0, 1e-12, 50)
        assert n_iter <= 50
