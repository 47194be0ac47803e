import json

import numpy as np
import pytest
from PIL import Image


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    """7-class, 70-image corpus of seeded random RGB images."""
    root = tmp_path_factory.mktemp("corpus")
    rng = np.random.default_rng(0)
    for c in range(7):
        d = root / f"class{c}"
        d.mkdir()
        for i in range(10):
            pixels = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
            Image.fromarray(pixels).save(d / f"img{i:02d}.png")
    return root


@pytest.fixture(scope="session")
def manifest_path(tmp_path_factory, corpus):
    path = tmp_path_factory.mktemp("manifest") / "manifest.json"
    path.write_text(json.dumps({
        "model_name": "alexnet",
        "layer": "classifier.4",
        "image_root": str(corpus),
        "weights": "random",
        "seed": 0,
    }))
    return path
