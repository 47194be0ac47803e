"""Synthetic activation sets with known ground-truth dissimilarity structure.

Images of class i are class_means[i] plus spherical Gaussian within-class
noise. The ground-truth RDM is computed from the specified means (not the
sampled ones), giving an exact oracle independent of sampling error.
Default shape: 7 classes x 128 units x 280 images per class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ActivationSet, RDM, validate_activation_set, _frozen
from .errors import ConfigInvalid, InvalidLevels
from .rdm import ClassMeans, compute_rdm

DEFAULT_CLASSES = 7
DEFAULT_UNITS = 128
DEFAULT_IMAGES_PER_CLASS = 280


@dataclass(frozen=True)
class SynthSpec:
    n_classes: int = DEFAULT_CLASSES
    units: int = DEFAULT_UNITS
    images_per_class: int = DEFAULT_IMAGES_PER_CLASS
    within_class_std: float = 1.0
    seed: int = 0
    class_means: np.ndarray | None = None  # (n_classes, units) or generated

    def __post_init__(self):
        if self.n_classes < 3:
            raise ConfigInvalid("n_classes must be >= 3")
        if self.units < 2:
            raise ConfigInvalid("units must be >= 2")
        if self.images_per_class < 1:
            raise ConfigInvalid("images_per_class must be >= 1")
        if self.within_class_std < 0:
            raise ConfigInvalid("within_class_std must be >= 0")
        if self.class_means is not None:
            m = np.asarray(self.class_means, dtype=np.float64)
            if m.shape != (self.n_classes, self.units):
                raise ConfigInvalid(
                    f"class_means shape {m.shape} != "
                    f"({self.n_classes}, {self.units})"
                )
            object.__setattr__(self, "class_means", _frozen(m))


def _means_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))


def _class_rng(seed: int, i: int) -> np.random.Generator:
    # per-class derived stream: classes may be generated concurrently
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(1, i))
    )


def resolve_means(spec: SynthSpec) -> np.ndarray:
    if spec.class_means is not None:
        return np.asarray(spec.class_means)
    return _means_rng(spec.seed).standard_normal((spec.n_classes, spec.units))


def class_name_list(n: int) -> tuple[str, ...]:
    return tuple(f"class{i}" for i in range(n))


def generate(spec: SynthSpec) -> tuple[ActivationSet, RDM]:
    """Sample an activation set and return it with its ground-truth RDM."""
    means = resolve_means(spec)
    names = class_name_list(spec.n_classes)
    truth = compute_rdm(ClassMeans(_frozen(means), names))
    m = spec.images_per_class
    rows = np.empty((spec.n_classes * m, spec.units))
    labels = np.repeat(np.arange(spec.n_classes), m)
    for i in range(spec.n_classes):
        block = rows[i * m : (i + 1) * m]
        if spec.within_class_std == 0.0:
            block[:] = means[i]
        else:
            noise = _class_rng(spec.seed, i).standard_normal((m, spec.units))
            block[:] = means[i] + spec.within_class_std * noise
    return validate_activation_set(rows, labels, names), truth


def make_graded_family(
    spec: SynthSpec, distortion_levels
) -> list[tuple[float, ActivationSet, RDM]]:
    """Family of sets whose mean structure degrades toward a random one.

    Level delta uses means (1-delta)*base + delta*random, with the random
    target fixed across levels (drawn from a stream keyed by the seed).
    Level 0 reproduces the base structure exactly.
    """
    levels = [float(d) for d in distortion_levels]
    if not levels or levels[0] != 0.0 or sorted(levels) != levels:
        raise InvalidLevels("levels must be ascending and start at 0")
    base = resolve_means(spec)
    rand_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=spec.seed, spawn_key=(2,))
    )
    target = rand_rng.standard_normal(base.shape)
    out = []
    for delta in levels:
        mixed = (1.0 - delta) * base + delta * target
        level_spec = SynthSpec(
            n_classes=spec.n_classes,
            units=spec.units,
            images_per_class=spec.images_per_class,
            within_class_std=spec.within_class_std,
            seed=spec.seed,
            class_means=mixed,
        )
        acts, truth = generate(level_spec)
        out.append((delta, acts, truth))
    return out
