import numpy as np
import pytest

from sdgnn import (
    AdamState,
    ConfigError,
    MLPClassifier,
    MlpParams,
    TrainConfig,
    adam_step,
    cross_entropy,
    evaluate,
    mlp_forward,
    train,
)
from sdgnn.classifier import glorot_uniform, init_params, loss_and_grads


def finite_difference_grads(params, x, labels, h=1e-5):
    """Central-difference oracle over every parameter tensor."""
    grads = []
    for tensor in params.tensors():
        grad = np.zeros_like(tensor)
        it = np.nditer(tensor, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = tensor[idx]
            tensor[idx] = orig + h
            up = cross_entropy(mlp_forward(params, x), labels)
            tensor[idx] = orig - h
            down = cross_entropy(mlp_forward(params, x), labels)
            tensor[idx] = orig
            grad[idx] = (up - down) / (2 * h)
        grads.append(grad)
    return grads


def separable_blobs(n_per_class=20, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=(-3, 0), scale=0.3, size=(n_per_class, 2))
    b = rng.normal(loc=(3, 0), scale=0.3, size=(n_per_class, 2))
    x = np.vstack([a, b])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return x, y


class TestMlpForward:
    def test_zero_weights_give_bias(self):
        p = MlpParams(w1=np.zeros((4, 3)), b1=np.zeros(4),
                      w2=np.zeros((2, 4)), b2=np.array([1.5, -0.5]))
        logits = mlp_forward(p, np.ones((5, 3)))
        assert np.array_equal(logits, np.tile([1.5, -0.5], (5, 1)))

    def test_scalar_chain(self):
        # 1-1-1 network: logits = w2 * relu(w1*x + b1) + b2
        p = MlpParams(w1=np.array([[2.0]]), b1=np.array([1.0]),
                      w2=np.array([[3.0]]), b2=np.array([-4.0]))
        out = mlp_forward(p, np.array([[0.5]]))
        assert out.tolist() == [[3.0 * (2.0 * 0.5 + 1.0) - 4.0]]

    def test_relu_clamps(self):
        p = MlpParams(w1=np.array([[1.0]]), b1=np.array([0.0]),
                      w2=np.array([[1.0]]), b2=np.array([0.0]))
        assert mlp_forward(p, np.array([[-2.0]])).tolist() == [[0.0]]

    def test_dropout_mask_applies(self):
        p = MlpParams(w1=np.ones((2, 1)), b1=np.zeros(2),
                      w2=np.ones((1, 2)), b2=np.zeros(1))
        mask = np.array([[2.0, 0.0]])
        out = mlp_forward(p, np.array([[1.0]]), dropout_mask=mask)
        assert out.tolist() == [[2.0]]

    def test_shape_mismatch(self):
        p = MlpParams(w1=np.ones((2, 3)), b1=np.zeros(2),
                      w2=np.ones((2, 2)), b2=np.zeros(2))
        with pytest.raises(Exception):
            mlp_forward(p, np.ones((1, 4)))


class TestCrossEntropy:
    def test_uniform_logits(self):
        for c in (2, 5, 9):
            loss = cross_entropy(np.zeros((1, c)), np.array([0]))
            assert abs(loss - np.log(c)) < 1e-12

    def test_extreme_logits_stable(self):
        loss = cross_entropy(np.array([[1000.0, 0.0]]), np.array([0]))
        assert 0.0 <= loss < 1e-6
        loss_wrong = cross_entropy(np.array([[1000.0, 0.0]]), np.array([1]))
        assert np.isfinite(loss_wrong) and loss_wrong > 100

    def test_batch_mean_matches_per_sample_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            logits = rng.normal(size=(7, 4))
            labels = rng.integers(0, 4, size=7)
            per_sample = []
            for row, lab in zip(logits, labels):
                p = np.exp(row) / np.exp(row).sum()
                per_sample.append(-np.log(p[lab]))
            assert abs(cross_entropy(logits, labels)
                       - np.mean(per_sample)) < 1e-12


class TestAdamStep:
    def make(self, value=1.0):
        p = MlpParams(w1=np.array([[value]]), b1=np.zeros(1),
                      w2=np.zeros((1, 1)), b2=np.zeros(1))
        return p, AdamState.for_params(p)

    def test_zero_gradients_leave_params_unchanged(self):
        p, s = self.make(2.0)
        cfg = TrainConfig(weight_decay=0.0)
        zeros = [np.zeros_like(t) for t in p.tensors()]
        adam_step(p, zeros, s, cfg)
        assert p.w1[0, 0] == 2.0

    def test_first_step_magnitude_is_lr(self):
        # t=1: m_hat = g, v_hat = g^2, step = lr * g / (|g| + eps) ~ lr
        p, s = self.make(0.0)
        cfg = TrainConfig(lr=0.01, weight_decay=0.0)
        grads = [np.array([[0.5]]), np.zeros(1), np.zeros((1, 1)), np.zeros(1)]
        adam_step(p, grads, s, cfg)
        assert abs(p.w1[0, 0] + cfg.lr) < 1e-9
        assert s.t == 1

    def test_timestep_increments(self):
        p, s = self.make()
        cfg = TrainConfig(weight_decay=0.0)
        zeros = [np.zeros_like(t) for t in p.tensors()]
        for expected in (1, 2, 3):
            adam_step(p, zeros, s, cfg)
            assert s.t == expected

    def test_quadratic_descent(self):
        # minimize (w - 3)^2 with its analytic gradient
        p, s = self.make(0.0)
        cfg = TrainConfig(lr=0.05, weight_decay=0.0)
        losses = []
        for _ in range(100):
            w = p.w1[0, 0]
            losses.append((w - 3.0) ** 2)
            grads = [np.array([[2 * (w - 3.0)]]), np.zeros(1),
                     np.zeros((1, 1)), np.zeros(1)]
            adam_step(p, grads, s, cfg)
        assert all(b < a for a, b in zip(losses[5:], losses[6:]))
        assert losses[-1] < losses[5]


class TestGradients:
    def test_analytic_matches_central_differences(self):
        rng = np.random.default_rng(11)
        for trial in range(20):
            n, d, h, c = 4, 5, 3, 3
            params = init_params(rng, d, c, hidden_dim=h)
            x = rng.normal(size=(n, d))
            labels = rng.integers(0, c, size=n)
            _, analytic = loss_and_grads(params, x, labels)
            numeric = finite_difference_grads(params, x, labels)
            for a, m in zip(analytic, numeric):
                denom = np.maximum(np.abs(m), 1e-8)
                rel = np.abs(a - m) / denom
                # ignore coordinates where both sides vanish
                rel[np.abs(a) + np.abs(m) < 1e-10] = 0.0
                assert rel.max() < 1e-4


class TestTrain:
    def split_of(self, n, val_fraction=0.2, seed=0):
        rng = np.random.default_rng(seed)
        perm = rng.permutation(n)
        n_val = max(1, int(n * val_fraction))
        return perm[n_val:], perm[:n_val]

    def test_separable_data_reaches_full_train_accuracy(self):
        x, y = separable_blobs()
        tr, val = self.split_of(len(x))
        cfg = TrainConfig(seed=1, dropout_rate=0.3, hidden_dim=16)
        result = train(x, y, (tr, val), cfg)
        assert evaluate(result.params, x, y, tr) == 1.0

    def test_patience_zero_stops_at_first_non_improvement(self):
        x, y = separable_blobs(seed=3)
        tr, val = self.split_of(len(x), seed=3)
        cfg = TrainConfig(seed=2, patience=0, dropout_rate=0.5, hidden_dim=8)
        result = train(x, y, (tr, val), cfg)
        val_losses = [v for _, v in result.history]
        # every epoch except the last strictly improved on the running best
        for i in range(len(val_losses) - 1):
            assert val_losses[i] == min(val_losses[: i + 1])
        if len(val_losses) < cfg.max_epochs:
            assert val_losses[-1] >= min(val_losses[:-1])

    def test_identical_seeds_bit_identical_history(self):
        x, y = separable_blobs(seed=4)
        tr, val = self.split_of(len(x), seed=4)
        cfg = TrainConfig(seed=7, hidden_dim=8, max_epochs=40, patience=40)
        h1 = train(x, y, (tr, val), cfg).history
        h2 = train(x, y, (tr, val), cfg).history
        assert h1 == h2

    def test_different_seeds_differ(self):
        x, y = separable_blobs(seed=4)
        tr, val = self.split_of(len(x), seed=4)
        base = dict(hidden_dim=8, max_epochs=10, patience=10)
        h1 = train(x, y, (tr, val), TrainConfig(seed=1, **base)).history
        h2 = train(x, y, (tr, val), TrainConfig(seed=2, **base)).history
        assert h1 != h2

    def test_returned_params_hit_best_val_loss(self):
        x, y = separable_blobs(seed=5)
        tr, val = self.split_of(len(x), seed=5)
        cfg = TrainConfig(seed=3, hidden_dim=8, max_epochs=60, patience=60,
                          dropout_rate=0.5)
        result = train(x, y, (tr, val), cfg)
        recorded = min(v for _, v in result.history)
        assert result.best_val_loss == recorded
        actual = cross_entropy(mlp_forward(result.params, x[val]), y[val])
        assert abs(actual - recorded) < 1e-12

    def test_empty_train_split_rejected(self):
        x, y = separable_blobs()
        with pytest.raises(ConfigError):
            train(x, y, (np.array([], dtype=int), np.array([0])), TrainConfig())

    def test_params_stay_finite(self):
        x, y = separable_blobs(seed=6)
        tr, val = self.split_of(len(x), seed=6)
        result = train(x, y, (tr, val), TrainConfig(seed=0, hidden_dim=8))
        for t in result.params.tensors():
            assert np.isfinite(t).all()

    def test_float32_mode(self):
        x, y = separable_blobs(seed=8)
        tr, val = self.split_of(len(x), seed=8)
        result = train(x, y, (tr, val),
                       TrainConfig(seed=0, hidden_dim=8, dtype="float32"))
        assert result.params.w1.dtype == np.float32

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            TrainConfig(dropout_rate=1.0)
        with pytest.raises(ConfigError):
            TrainConfig(patience=300, max_epochs=200)


class TestInit:
    def test_glorot_bound(self):
        rng = np.random.default_rng(0)
        w = glorot_uniform(rng, 64, 32, np.float64)
        bound = np.sqrt(6.0 / (64 + 32))
        assert np.abs(w).max() <= bound
        assert w.shape == (64, 32)

    def test_biases_start_at_zero(self):
        params = init_params(np.random.default_rng(0), 5, 3)
        assert not params.b1.any() and not params.b2.any()
        assert params.w1.shape == (128, 5)


class TestEvaluate:
    def test_perfect_predictor(self):
        p = MlpParams(w1=np.eye(2), b1=np.zeros(2),
                      w2=np.eye(2) * 10, b2=np.zeros(2))
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        y = np.array([0, 1])
        assert evaluate(p, x, y, np.array([0, 1])) == 1.0

    def test_constant_predictor_on_balanced_binary(self):
        p = MlpParams(w1=np.zeros((2, 2)), b1=np.zeros(2),
                      w2=np.zeros((2, 2)), b2=np.zeros(2))
        x = np.zeros((10, 2))
        y = np.array([0, 1] * 5)
        # all-zero logits tie; argmax resolves to class 0
        assert evaluate(p, x, y, np.arange(10)) == 0.5

    def test_matches_recount_oracle(self):
        rng = np.random.default_rng(12)
        params = init_params(rng, 4, 3, hidden_dim=6)
        x = rng.normal(size=(30, 4))
        y = rng.integers(0, 3, size=30)
        ids = rng.choice(30, size=12, replace=False)
        logits = mlp_forward(params, x[ids])
        correct = sum(
            int(np.argmax(row) == y[i]) for row, i in zip(logits, ids)
        )
        assert evaluate(params, x, y, ids) == correct / len(ids)

    def test_empty_set_rejected(self):
        params = init_params(np.random.default_rng(0), 2, 2)
        with pytest.raises(ValueError):
            evaluate(params, np.zeros((3, 2)), np.zeros(3, dtype=int),
                     np.array([], dtype=int))


class TestEstimatorApi:
    def test_fit_predict_score(self):
        x, y = separable_blobs(seed=9)
        clf = MLPClassifier(hidden_dim=8, seed=0, dropout_rate=0.3)
        clf.fit(x, y)
        assert clf.score(x, y) > 0.9
        assert set(clf.predict(x)) <= {0, 1}

    def test_explicit_validation_set(self):
        x, y = separable_blobs(seed=10)
        clf = MLPClassifier(hidden_dim=8, seed=0)
        clf.fit(x[:30], y[:30], X_val=x[30:], y_val=y[30:])
        assert hasattr(clf, "history_")

    def test_not_fitted(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            MLPClassifier().predict(np.zeros((1, 2)))

    def test_get_set_params_roundtrip(self):
        clf = MLPClassifier(lr=0.5, patience=3, max_epochs=10)
        params = clf.get_params()
        assert params["lr"] == 0.5
        clone = MLPClassifier(**params)
        assert clone.get_params() == params
        clf.set_params(lr=0.25)
        assert clf.lr == 0.25

    def test_sklearn_clone(self):
        from sklearn.base import clone

        clf = MLPClassifier(hidden_dim=16, seed=5)
        cloned = clone(clf)
        assert cloned.get_params() == clf.get_params()
