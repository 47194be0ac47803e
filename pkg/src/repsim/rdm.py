"""Class-mean activations and the correlation-distance dissimilarity matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ActivationSet, RDM, class_subset, make_rdm, _frozen
from .errors import DegenerateClassMean

VAR_EPS = 0.0  # exact zero variance is the degeneracy condition


@dataclass(frozen=True)
class ClassMeans:
    """Per-class mean feature vectors, one row per class."""

    values: np.ndarray  # (n_classes, num_units)
    class_names: tuple[str, ...]


def _pairwise_sum_rows(m: np.ndarray) -> np.ndarray:
    """Sum rows by a strict pairwise tree (stabler than sequential adds)."""
    while m.shape[0] > 1:
        if m.shape[0] % 2:
            m = np.concatenate([m[:-1:2] + m[1::2], m[-1:]], axis=0)
        else:
            m = m[0::2] + m[1::2]
    return m[0]


def class_mean(a: ActivationSet, i: int) -> np.ndarray:
    """Elementwise mean over the rows of class i."""
    rows = class_subset(a, i)
    return _pairwise_sum_rows(rows) / rows.shape[0]


def class_means(a: ActivationSet) -> ClassMeans:
    means = np.stack([class_mean(a, i) for i in range(a.n_classes)])
    return ClassMeans(_frozen(means), a.class_names)


def _center(v: np.ndarray) -> np.ndarray:
    return v - v.mean()


def compute_rdm(means: ClassMeans) -> RDM:
    """Dissimilarity 1 - Pearson(mean_i, mean_j) across the unit dimension.

    Each upper-triangular pair is computed once and mirrored; the diagonal
    is exactly zero. A constant mean vector has zero variance, which makes
    the correlation undefined and raises DegenerateClassMean.
    """
    m = means.values
    n, d = m.shape
    centered = m - m.mean(axis=1, keepdims=True)
    variances = (centered * centered).sum(axis=1) / d
    if (variances == VAR_EPS).any():
        bad = int(np.flatnonzero(variances == 0)[0])
        raise DegenerateClassMean(
            f"class {means.class_names[bad]!r} has a constant mean vector"
        )
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            cov = np.dot(centered[i], centered[j]) / d
            r = 1.0 - cov / np.sqrt(variances[i] * variances[j])
            out[i, j] = r
            out[j, i] = r
    # correlation can overshoot [-1, 1] by rounding; clip within tolerance
    np.clip(out, 0.0, 2.0, out=out)
    return make_rdm(out, means.class_names)


def rdm_from_activations(a: ActivationSet) -> RDM:
    return compute_rdm(class_means(a))
