"""Small fully-connected classifier with pluggable regularization.

Supports none / L1 / L2 weight penalties and the activation-decorrelation
penalty applied at every hidden layer, plus inverted dropout. Training is
plain seeded mini-batch gradient descent so analytic gradients stay exactly
checkable against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import ActivationSet, validate_activation_set
from .decov import batch_covariance, decov_gradient, decov_loss
from .errors import ConfigInvalid, ShapeMismatch

REGULARIZERS = ("none", "l1", "l2", "decov")


@dataclass(frozen=True)
class MLPModel:
    layer_dims: tuple[int, ...]
    weights: tuple[np.ndarray, ...]  # weights[l]: (dims[l], dims[l+1])
    biases: tuple[np.ndarray, ...]  # biases[l]: (dims[l+1],)


@dataclass(frozen=True)
class TrainConfig:
    hidden_dims: tuple[int, ...] = (32,)
    regularizer: str = "none"
    reg_weight: float = 0.0
    decov_weight: float = 0.0
    dropout_rate: float = 0.0
    learning_rate: float = 0.05
    batch_size: int = 32
    epochs: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.regularizer not in REGULARIZERS:
            raise ConfigInvalid(f"regularizer must be one of {REGULARIZERS}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigInvalid("dropout_rate must be in [0, 1)")
        if self.learning_rate <= 0:
            raise ConfigInvalid("learning_rate must be positive")
        if self.batch_size < 2:
            raise ConfigInvalid("batch_size must be >= 2")
        if self.epochs < 0:
            raise ConfigInvalid("epochs must be >= 0")
        if self.reg_weight < 0 or self.decov_weight < 0:
            raise ConfigInvalid("regularizer weights must be >= 0")
        if not self.hidden_dims or any(d < 1 for d in self.hidden_dims):
            raise ConfigInvalid("hidden_dims must be positive")


def init_model(layer_dims, seed_or_rng) -> MLPModel:
    """Fan-balanced uniform init: W ~ U(+-sqrt(6/(fan_in+fan_out))), b = 0."""
    rng = (
        seed_or_rng
        if isinstance(seed_or_rng, np.random.Generator)
        else np.random.default_rng(seed_or_rng)
    )
    dims = tuple(int(d) for d in layer_dims)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MLPModel(dims, tuple(weights), tuple(biases))


def forward(model: MLPModel, x, dropout_rate: float = 0.0, rng=None):
    """Feed-forward pass; returns (hidden activations list, logits).

    Hidden layers use the rectifier; the output layer is linear. With
    dropout_rate > 0 an rng must be supplied (training mode) and inverted
    dropout is applied: units kept with probability 1-p and scaled by
    1/(1-p), so inference needs no rescaling.
    """
    hiddens, logits, _, _ = _forward_full(model, x, dropout_rate, rng)
    return hiddens, logits


def _forward_full(model, x, dropout_rate, rng):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.layer_dims[0]:
        raise ShapeMismatch(
            f"input shape {x.shape} incompatible with d_in={model.layer_dims[0]}"
        )
    if dropout_rate > 0 and rng is None:
        raise ConfigInvalid("dropout_rate > 0 requires an rng (training mode)")
    n_layers = len(model.weights)
    a = x
    hiddens, pre_acts, masks = [], [], []
    for l in range(n_layers):
        z = a @ model.weights[l] + model.biases[l]
        if l == n_layers - 1:
            return hiddens, z, pre_acts, masks
        pre_acts.append(z)
        h = np.maximum(z, 0.0)
        if dropout_rate > 0:
            keep = 1.0 - dropout_rate
            mask = (rng.random(h.shape) < keep) / keep
            h = h * mask
            masks.append(mask)
        else:
            masks.append(None)
        hiddens.append(h)
        a = h
    raise ShapeMismatch("model has no layers")  # pragma: no cover


def penalty(regularizer: str, weights, lam: float) -> float:
    """Weight-norm penalty: l1 -> lam*sum|w|, l2 -> (lam/2)*sum w^2."""
    if lam < 0:
        raise ConfigInvalid("penalty weight must be >= 0")
    if regularizer == "l1":
        return lam * float(sum(np.abs(w).sum() for w in weights))
    if regularizer == "l2":
        return 0.5 * lam * float(sum((w * w).sum() for w in weights))
    return 0.0


def _penalty_grad(regularizer, w, lam):
    if regularizer == "l1":
        return lam * np.sign(w)  # subgradient 0 at w == 0
    if regularizer == "l2":
        return lam * w
    return 0.0


def total_loss_and_grads(model: MLPModel, x, labels, cfg: TrainConfig, rng=None):
    """Cross-entropy + weight penalty + decorrelation loss with gradients.

    Returns (loss, weight grads, bias grads). The decorrelation term is
    lambda_decov times the sum of per-hidden-layer losses on the activations
    that actually feed forward (post-dropout in training mode).
    """
    labels = np.asarray(labels, dtype=np.int64)
    hiddens, logits, pre_acts, masks = _forward_full(
        model, x, cfg.dropout_rate, rng
    )
    n = logits.shape[0]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -float(log_probs[np.arange(n), labels].mean())
    loss += penalty(cfg.regularizer, model.weights, cfg.reg_weight)
    use_decov = cfg.regularizer == "decov" and cfg.decov_weight > 0
    if use_decov:
        loss += cfg.decov_weight * sum(
            decov_loss(batch_covariance(h)) for h in hiddens
        )

    delta = np.exp(log_probs)
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    n_layers = len(model.weights)
    grads_w = [None] * n_layers
    grads_b = [None] * n_layers
    for l in range(n_layers - 1, -1, -1):
        a_in = x if l == 0 else hiddens[l - 1]
        grads_w[l] = a_in.T @ delta + _penalty_grad(
            cfg.regularizer, model.weights[l], cfg.reg_weight
        )
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            dh = delta @ model.weights[l].T
            if use_decov:
                dh = dh + cfg.decov_weight * decov_gradient(hiddens[l - 1])
            if masks[l - 1] is not None:
                dh = dh * masks[l - 1]
            delta = dh * (pre_acts[l - 1] > 0)
    return loss, grads_w, grads_b


def train(dataset: ActivationSet, cfg: TrainConfig):
    """Mini-batch gradient descent; returns (model, per-epoch metrics).

    Batches are formed by a seeded shuffle each epoch; a trailing batch of
    fewer than 2 samples is skipped (batch covariance is undefined there).
    Deterministic: identical config and data give bitwise-identical weights.
    """
    rng = np.random.default_rng(cfg.seed)
    dims = (dataset.num_units, *cfg.hidden_dims, dataset.n_classes)
    model = init_model(dims, rng)
    x, y = dataset.values, dataset.labels
    n = x.shape[0]
    metrics = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            if len(idx) < 2:
                continue
            _, gw, gb = total_loss_and_grads(
                model, x[idx], y[idx], cfg, rng if cfg.dropout_rate > 0 else None
            )
            model = MLPModel(
                model.layer_dims,
                tuple(
                    w - cfg.learning_rate * g for w, g in zip(model.weights, gw)
                ),
                tuple(
                    b - cfg.learning_rate * g for b, g in zip(model.biases, gb)
                ),
            )
        metrics.append(_epoch_metrics(model, x, y, cfg, epoch))
    return model, metrics


def _epoch_metrics(model, x, y, cfg, epoch):
    eval_cfg = replace(cfg, dropout_rate=0.0)
    loss, _, _ = total_loss_and_grads(model, x, y, eval_cfg)
    hiddens, logits = forward(model, x)
    acc = float((logits.argmax(axis=1) == y).mean())
    c = batch_covariance(hiddens[-1])
    d = c.shape[0]
    off = c - np.diag(np.diag(c))
    mean_sq_off = float((off * off).sum() / (d * (d - 1))) if d > 1 else 0.0
    return {
        "epoch": epoch,
        "loss": loss,
        "accuracy": acc,
        "mean_offdiag_sq_cov": mean_sq_off,
    }


def penultimate_activations(model: MLPModel, x) -> np.ndarray:
    """Inference-mode activations of the last hidden layer."""
    hiddens, _ = forward(model, x)
    return hiddens[-1]


def penultimate_activation_set(
    model: MLPModel, dataset: ActivationSet
) -> ActivationSet:
    acts = penultimate_activations(model, dataset.values)
    return validate_activation_set(acts, dataset.labels, dataset.class_names)
