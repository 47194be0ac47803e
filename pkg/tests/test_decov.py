import numpy as np
import pytest

from repsim.decov import batch_covariance, decov_gradient, decov_loss
from repsim.errors import BatchTooSmall, NonSquare


def finite_difference_gradient(h, eps=1e-5):
    """Oracle: central differences of decov_loss(batch_covariance(.))."""
    h = np.asarray(h, dtype=np.float64)
    g = np.zeros_like(h)
    for a in range(h.shape[0]):
        for i in range(h.shape[1]):
            hp = h.copy()
            hp[a, i] += eps
            hm = h.copy()
            hm[a, i] -= eps
            g[a, i] = (
                decov_loss(batch_covariance(hp))
                - decov_loss(batch_covariance(hm))
            ) / (2 * eps)
    return g


def test_covariance_hand_example():
    c = batch_covariance([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(c, [[1.0, 1.0], [1.0, 1.0]], atol=1e-15)


def test_covariance_second_hand_example():
    c = batch_covariance([[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(c, [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)


def test_covariance_constant_column_zeroed():
    c = batch_covariance([[2.0, 1.0], [2.0, 3.0], [2.0, -1.0]])
    np.testing.assert_array_equal(c[0], 0.0)
    np.testing.assert_array_equal(c[:, 0], 0.0)


def test_covariance_symmetric_nonneg_diag():
    rng = np.random.default_rng(0)
    for _ in range(20):
        h = rng.uniform(-2, 2, size=(5, 4))
        c = batch_covariance(h)
        np.testing.assert_allclose(c, c.T, atol=1e-12)
        assert (np.diag(c) >= 0).all()


def test_covariance_batch_too_small():
    with pytest.raises(BatchTooSmall):
        batch_covariance([[1.0, 2.0]])


def test_loss_examples():
    assert decov_loss(np.diag([1.0, 2.0, 3.0])) == 0.0
    assert decov_loss([[1.0, 1.0], [1.0, 1.0]]) == 1.0
    assert decov_loss([[0.25, -0.25], [-0.25, 0.25]]) == 0.0625
    assert decov_loss(batch_covariance([[1.0, 2.0], [3.0, 4.0]])) == 1.0
    with pytest.raises(NonSquare):
        decov_loss(np.ones((2, 3)))


def test_loss_nonnegative_zero_iff_diagonal():
    rng = np.random.default_rng(1)
    for _ in range(50):
        h = rng.uniform(-2, 2, size=(4, 3))
        c = batch_covariance(h)
        loss = decov_loss(c)
        assert loss >= 0.0
        off = c - np.diag(np.diag(c))
        assert (loss <= 1e-12) == (np.abs(off).max() <= 1e-6)


def test_gradient_hand_example():
    g = decov_gradient([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(g, [[-1.0, -1.0], [1.0, 1.0]], atol=1e-15)
    np.testing.assert_allclose(
        g, finite_difference_gradient([[1.0, 2.0], [3.0, 4.0]]), atol=1e-8
    )


def test_gradient_zero_when_decorrelated():
    # orthogonal centered columns: off-diagonal covariances all zero
    h = np.array([[1.0, 1.0], [-1.0, 1.0], [1.0, -1.0], [-1.0, -1.0]])
    assert decov_loss(batch_covariance(h)) == 0.0
    np.testing.assert_array_equal(decov_gradient(h), 0.0)


def test_gradient_matches_finite_differences_bulk():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        nb = int(rng.integers(2, 9))
        d = int(rng.integers(2, 7))
        h = rng.uniform(-2, 2, size=(nb, d))
        g = decov_gradient(h)
        fd = finite_difference_gradient(h)
        denom = max(np.abs(fd).max(), 1e-8)
        worst = max(worst, np.abs(g - fd).max() / denom)
    assert worst < 1e-6


def test_translation_invariance():
    rng = np.random.default_rng(3)
    h = rng.uniform(-2, 2, size=(6, 4))
    shift = rng.standard_normal(4) * 3
    l0 = decov_loss(batch_covariance(h))
    l1 = decov_loss(batch_covariance(h + shift))
    assert l1 == pytest.approx(l0, abs=1e-10)
    np.testing.assert_allclose(
        decov_gradient(h + shift), decov_gradient(h), atol=1e-10
    )
