"""Additive Gaussian measurement-noise model for model activations.

The noise is dispersion-matched: each unit's perturbation is scaled by that
unit's empirical standard deviation (or the grand std of all values), times
a caller-chosen amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ActivationSet, _frozen
from .errors import ConfigInvalid

MODES = ("per_unit_std", "global_std")


@dataclass(frozen=True)
class NoiseSpec:
    amplitude: float = 1.0
    mode: str = "per_unit_std"

    def __post_init__(self):
        if self.amplitude < 0:
            raise ConfigInvalid(f"noise amplitude must be >= 0, got {self.amplitude}")
        if self.mode not in MODES:
            raise ConfigInvalid(f"noise mode must be one of {MODES}, got {self.mode!r}")

    def to_dict(self) -> dict:
        return {"amplitude": self.amplitude, "mode": self.mode}


def apply_noise(
    a: ActivationSet, spec: NoiseSpec, rng: np.random.Generator
) -> ActivationSet:
    """Add amplitude * scale * N(0,1) noise to every entry.

    scale is the per-unit empirical std (population convention) in
    per_unit_std mode, or the grand std of all values in global_std mode.
    Draws happen in row-major order from the supplied stream. The input is
    never mutated; amplitude 0 returns an output bitwise equal to the input.
    """
    if spec.amplitude == 0.0:
        return ActivationSet(a.values, a.labels, a.class_names)
    if spec.mode == "per_unit_std":
        scale = a.values.std(axis=0)
    else:
        scale = a.values.std()
    z = rng.standard_normal(a.values.shape)
    values = a.values + spec.amplitude * scale * z
    return ActivationSet(_frozen(values), a.labels, a.class_names)
