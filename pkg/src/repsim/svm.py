"""One-vs-rest linear SVM readout trained by stochastic subgradient descent.

Each class gets an independent binary hinge-loss problem with an L2 term
1/(2c) * ||w||^2, optimized Pegasos-style with step size 1/(lambda * t).
Per-class streams are derived from the master seed so classes can be
trained in any order (or concurrently) with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ActivationSet
from .errors import ConfigInvalid, ShapeMismatch, TooFewClasses, TooFewImages


@dataclass(frozen=True)
class LinearSVMModel:
    weights: np.ndarray  # (n_classes, num_units)
    biases: np.ndarray  # (n_classes,)
    class_names: tuple[str, ...]


def train_svm(
    train: ActivationSet, c: float, epochs: int, seed: int
) -> LinearSVMModel:
    """Train one binary hinge classifier per class, one-vs-rest."""
    if c <= 0:
        raise ConfigInvalid(f"c must be positive, got {c}")
    if epochs < 0:
        raise ConfigInvalid(f"epochs must be >= 0, got {epochs}")
    if train.n_classes < 2:
        raise TooFewClasses("need at least 2 classes")
    lam = 1.0 / c
    x = train.values
    n, d = x.shape
    weights = np.zeros((train.n_classes, d))
    biases = np.zeros(train.n_classes)
    for cls in range(train.n_classes):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(cls,))
        )
        y = np.where(train.labels == cls, 1.0, -1.0)
        w = np.zeros(d)
        b = 0.0
        t = 0
        for _ in range(epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (lam * t)
                margin = y[i] * (np.dot(w, x[i]) + b)
                w *= 1.0 - eta * lam
                if margin < 1.0:
                    w += eta * y[i] * x[i]
                    b += eta * y[i]
        weights[cls] = w
        biases[cls] = b
    return LinearSVMModel(weights, biases, train.class_names)


def scores(m: LinearSVMModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != m.weights.shape[1]:
        raise ShapeMismatch(
            f"input shape {x.shape} incompatible with {m.weights.shape[1]} units"
        )
    return x @ m.weights.T + m.biases


def predict(m: LinearSVMModel, x) -> np.ndarray:
    """Argmax over per-class scores; ties break toward the lowest index."""
    return scores(m, x).argmax(axis=1)


def accuracy(m: LinearSVMModel, test: ActivationSet) -> float:
    """Fraction of rows whose predicted class equals the true label."""
    return float((predict(m, test.values) == test.labels).mean())


def hinge_objective(w, b, x, y, lam) -> float:
    """Binary hinge objective used by the SGD above; kept for gradient checks."""
    margins = y * (x @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


def stratified_split(
    labels: np.ndarray, test_fraction: float, rng: np.random.Generator
):
    """Seeded stratified split; every class contributes to both sides."""
    train_idx, test_idx = [], []
    for cls in np.unique(labels):
        rows = np.flatnonzero(labels == cls)
        rows = rng.permutation(rows)
        n_test = int(round(len(rows) * test_fraction))
        if n_test < 1 or n_test >= len(rows):
            raise TooFewImages(
                f"class {cls} too small for test fraction {test_fraction}"
            )
        test_idx.append(rows[:n_test])
        train_idx.append(rows[n_test:])
    return np.concatenate(train_idx), np.concatenate(test_idx)


def cross_validated_accuracy(
    data: ActivationSet,
    c: float,
    epochs: int,
    seed: int,
    splits: int = 5,
    test_fraction: float = 0.3,
):
    """Mean and population std of test accuracy over seeded stratified splits."""
    from .core import ActivationSet as AS

    accs = np.empty(splits)
    for s in range(splits):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(1000 + s,))
        )
        tr, te = stratified_split(data.labels, test_fraction, rng)
        train_set = AS(data.values[tr], data.labels[tr], data.class_names)
        test_set = AS(data.values[te], data.labels[te], data.class_names)
        model = train_svm(train_set, c, epochs, seed + s)
        accs[s] = accuracy(model, test_set)
    return float(accs.mean()), float(accs.std()), accs
