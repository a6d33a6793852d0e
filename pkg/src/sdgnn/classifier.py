"""Minimal two-layer MLP classifier trained with Adam and early stopping.

The only trainable component of the pipeline: hidden linear layer
(default width 128) + ReLU + inverted dropout, then a linear output
layer, optimized full-batch against softmax cross-entropy. Training
tracks the best validation loss and restores those parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

from .errors import ConfigError, ShapeError
from .validation import check_feature_matrix, check_labels


@dataclass
class TrainConfig:
    lr: float = 0.01
    weight_decay: float = 1e-4
    max_epochs: int = 200
    patience: int = 30
    dropout_rate: float = 0.7
    seed: int = 0
    hidden_dim: int = 128
    dtype: str = "float64"

    def __post_init__(self):
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if self.patience > self.max_epochs:
            raise ConfigError("patience must not exceed max_epochs")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"dtype must be float32 or float64, got {self.dtype}")


@dataclass
class MlpParams:
    w1: np.ndarray  # hidden x in
    b1: np.ndarray  # hidden
    w2: np.ndarray  # classes x hidden
    b2: np.ndarray  # classes

    def tensors(self):
        return [self.w1, self.b1, self.w2, self.b2]

    def copy(self) -> "MlpParams":
        return MlpParams(*(t.copy() for t in self.tensors()))


@dataclass
class AdamState:
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @staticmethod
    def for_params(params: MlpParams) -> "AdamState":
        return AdamState(
            m=[np.zeros_like(t) for t in params.tensors()],
            v=[np.zeros_like(t) for t in params.tensors()],
        )


def glorot_uniform(rng, fan_out, fan_in, dtype):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)


def init_params(rng, in_dim, num_classes, hidden_dim=128,
                dtype=np.float64) -> MlpParams:
    return MlpParams(
        w1=glorot_uniform(rng, hidden_dim, in_dim, dtype),
        b1=np.zeros(hidden_dim, dtype=dtype),
        w2=glorot_uniform(rng, num_classes, hidden_dim, dtype),
        b2=np.zeros(num_classes, dtype=dtype),
    )


def mlp_forward(params: MlpParams, x, dropout_mask=None):
    """Class logits; dropout_mask (already inverted-scaled) applies in training only."""
    x = np.atleast_2d(np.asarray(x))
    if x.shape[1] != params.w1.shape[1]:
        raise ShapeError(
            f"input dim {x.shape[1]} != weight dim {params.w1.shape[1]}"
        )
    hidden = np.maximum(x @ params.w1.T + params.b1, 0.0)
    if dropout_mask is not None:
        hidden = hidden * dropout_mask
    return hidden @ params.w2.T + params.b2


def _log_softmax(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def cross_entropy(logits, labels) -> float:
    """Mean negative log-likelihood, computed with a max shift for stability."""
    logits = np.atleast_2d(np.asarray(logits))
    labels = np.atleast_1d(np.asarray(labels))
    logp = _log_softmax(logits)
    return float(-logp[np.arange(len(labels)), labels].mean())


def loss_and_grads(params: MlpParams, x, labels, dropout_mask=None):
    """Cross-entropy value and analytic gradients for every tensor."""
    n = x.shape[0]
    pre = x @ params.w1.T + params.b1
    hidden = np.maximum(pre, 0.0)
    dropped = hidden * dropout_mask if dropout_mask is not None else hidden
    logits = dropped @ params.w2.T + params.b2
    logp = _log_softmax(logits)
    loss = float(-logp[np.arange(n), labels].mean())

    dlogits = np.exp(logp)
    dlogits[np.arange(n), labels] -= 1.0
    dlogits /= n
    dw2 = dlogits.T @ dropped
    db2 = dlogits.sum(axis=0)
    dhidden = dlogits @ params.w2
    if dropout_mask is not None:
        dhidden = dhidden * dropout_mask
    dpre = dhidden * (pre > 0)
    dw1 = dpre.T @ x
    db1 = dpre.sum(axis=0)
    return loss, [dw1, db1, dw2, db2]


def adam_step(params: MlpParams, grads, state: AdamState, cfg: TrainConfig):
    """In-place Adam update with classic coupled L2 on the gradients."""
    state.t += 1
    tensors = params.tensors()
    for i, (p, g) in enumerate(zip(tensors, grads)):
        g = g + cfg.weight_decay * p
        state.m[i] = state.beta1 * state.m[i] + (1 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1 - state.beta2) * (g * g)
        m_hat = state.m[i] / (1 - state.beta1 ** state.t)
        v_hat = state.v[i] / (1 - state.beta2 ** state.t)
        p -= cfg.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state


@dataclass
class TrainResult:
    params: MlpParams
    history: list          # (train_loss, val_loss) per executed epoch
    best_epoch: int
    best_val_loss: float


def train(embeddings, labels, split, cfg: TrainConfig,
          num_classes=None) -> TrainResult:
    """Full-batch training with best-validation-loss parameter tracking.

    `split` is anything carrying train/val node-id arrays, either as
    attributes or as a 2-tuple. Training stops once the validation loss
    has not improved for `patience` consecutive epochs (patience=0
    stops at the first non-improving epoch) or at max_epochs.
    """
    if hasattr(split, "train"):
        train_ids, val_ids = split.train, split.val
    else:
        train_ids, val_ids = split
    train_ids = np.asarray(train_ids, dtype=np.int64)
    val_ids = np.asarray(val_ids, dtype=np.int64)
    if len(train_ids) == 0:
        raise ConfigError("training split is empty")
    if len(val_ids) == 0:
        raise ConfigError("validation split is empty")

    dtype = np.dtype(cfg.dtype)
    x = np.asarray(embeddings, dtype=dtype)
    y = np.asarray(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = int(y.max()) + 1

    rng = np.random.default_rng(cfg.seed)
    params = init_params(rng, x.shape[1], num_classes, cfg.hidden_dim, dtype)
    state = AdamState.for_params(params)

    x_tr, y_tr = x[train_ids], y[train_ids]
    x_val, y_val = x[val_ids], y[val_ids]

    best_val = np.inf
    best_params = params.copy()
    best_epoch = -1
    bad_epochs = 0
    history = []
    keep = 1.0 - cfg.dropout_rate
    for epoch in range(cfg.max_epochs):
        if cfg.dropout_rate > 0.0:
            mask = (rng.random((len(x_tr), cfg.hidden_dim)) < keep)
            mask = mask.astype(dtype) / keep
        else:
            mask = None
        train_loss, grads = loss_and_grads(params, x_tr, y_tr, mask)
        adam_step(params, grads, state, cfg)
        val_loss = cross_entropy(mlp_forward(params, x_val), y_val)
        history.append((train_loss, val_loss))
        if val_loss < best_val:
            best_val = val_loss
            best_params = params.copy()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= max(cfg.patience, 1):
                break
    return TrainResult(params=best_params, history=history,
                       best_epoch=best_epoch, best_val_loss=float(best_val))


def evaluate(params: MlpParams, embeddings, labels, node_ids) -> float:
    """Fraction of argmax-correct predictions over the given node set."""
    node_ids = np.asarray(node_ids, dtype=np.int64)
    if len(node_ids) == 0:
        raise ValueError("evaluate on an empty node set")
    x = np.asarray(embeddings, dtype=params.w1.dtype)
    logits = mlp_forward(params, x[node_ids])
    pred = np.argmax(logits, axis=1)  # ties resolve to the lowest class
    return float(np.mean(pred == np.asarray(labels)[node_ids]))


class MLPClassifier(BaseEstimator, ClassifierMixin):
    """Sklearn-style front end over the functional training loop.

    fit() accepts an explicit validation set for early stopping; when
    none is given, a seeded 10% slice of the training data is held out.
    """

    def __init__(self, hidden_dim=128, lr=0.01, weight_decay=1e-4,
                 max_epochs=200, patience=30, dropout_rate=0.7, seed=0,
                 dtype="float64"):
        self.hidden_dim = hidden_dim
        self.lr = lr
        self.weight_decay = weight_decay
        self.max_epochs = max_epochs
        self.patience = patience
        self.dropout_rate = dropout_rate
        self.seed = seed
        self.dtype = dtype

    def _config(self) -> TrainConfig:
        return TrainConfig(
            lr=self.lr, weight_decay=self.weight_decay,
            max_epochs=self.max_epochs, patience=self.patience,
            dropout_rate=self.dropout_rate, seed=self.seed,
            hidden_dim=self.hidden_dim, dtype=self.dtype,
        )

    def fit(self, X, y, X_val=None, y_val=None):
        X = check_feature_matrix(X)
        y = check_labels(y, num_rows=X.shape[0])
        if X_val is None:
            rng = np.random.default_rng(self.seed)
            perm = rng.permutation(len(X))
            n_val = max(1, len(X) // 10)
            val_ids, train_ids = perm[:n_val], perm[n_val:]
            data, labels = X, y
        else:
            X_val = check_feature_matrix(X_val)
            y_val = check_labels(y_val, num_rows=X_val.shape[0])
            data = np.vstack([X, X_val])
            labels = np.concatenate([y, y_val])
            train_ids = np.arange(len(X))
            val_ids = np.arange(len(X), len(data))
        self.num_classes_ = int(labels.max()) + 1
        result = train(data, labels, (train_ids, val_ids), self._config(),
                       num_classes=self.num_classes_)
        self.params_ = result.params
        self.history_ = result.history
        self.best_epoch_ = result.best_epoch
        return self

    def _require_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError("MLPClassifier is not fitted yet")

    def decision_function(self, X):
        self._require_fitted()
        X = check_feature_matrix(X)
        return mlp_forward(self.params_, X.astype(self.params_.w1.dtype))

    def predict(self, X):
        return np.argmax(self.decision_function(X), axis=1)

    def score(self, X, y):
        y = check_labels(y)
        return float(np.mean(self.predict(X) == y))
