import numpy as np
import pytest

from repsim.core import validate_activation_set


def random_activation_set(rng, n_classes=4, units=6, images_per_class=5):
    """Non-degenerate random set: every class present, random finite values."""
    values = rng.standard_normal((n_classes * images_per_class, units))
    labels = np.repeat(np.arange(n_classes), images_per_class)
    names = [f"c{i}" for i in range(n_classes)]
    return validate_activation_set(values, labels, names)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
