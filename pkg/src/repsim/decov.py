"""Cross-covariance (DeCov) penalty on batch activations and its gradient.

The penalty is half the squared Frobenius norm of the batch covariance
matrix minus its diagonal, i.e. half the sum of squared off-diagonal
covariances. The covariance uses the 1/N batch normalization.
"""

from __future__ import annotations

import numpy as np

from .errors import BatchTooSmall, NonSquare


def _check_batch(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2:
        raise NonSquare(f"batch must be 2-D, got ndim={h.ndim}")
    if h.shape[0] < 2:
        raise BatchTooSmall(f"need at least 2 samples, got {h.shape[0]}")
    return h


def batch_covariance(h) -> np.ndarray:
    """d x d covariance of unit activations over the batch, 1/N normalized."""
    h = _check_batch(h)
    n = h.shape[0]
    centered = h - h.mean(axis=0)
    return centered.T @ centered / n


def decov_loss(c) -> float:
    """Half the sum of squares of the off-diagonal covariance entries."""
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise NonSquare(f"covariance must be square, got shape {c.shape}")
    off = c - np.diag(np.diag(c))
    return 0.5 * float((off * off).sum())


def decov_gradient(h) -> np.ndarray:
    """Exact gradient of decov_loss(batch_covariance(h)) w.r.t. h.

    d loss / d h[a, i] = (2/N) * sum_{j != i} C[i, j] * (h[a, j] - mu[j]);
    the terms from the batch means cancel because centered columns sum to 0.
    """
    h = _check_batch(h)
    n = h.shape[0]
    centered = h - h.mean(axis=0)
    c = centered.T @ centered / n
    np.fill_diagonal(c, 0.0)
    return (2.0 / n) * centered @ c
