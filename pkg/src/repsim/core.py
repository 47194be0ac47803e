"""Core data model: labeled activation sets, dissimilarity matrices, reports.

All numeric payloads are float64 numpy arrays, marked read-only after
construction so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ClassMismatch,
    ClassOutOfRange,
    DuplicateClassName,
    EmptyClass,
    NonFiniteValue,
    ShapeMismatch,
)

DIAG_TOL = 1e-12
RANGE_TOL = 1e-12


def _frozen(a: np.ndarray, dtype=np.float64) -> np.ndarray:
    """Copy to a C-contiguous read-only array of the given dtype."""
    out = np.array(a, dtype=dtype, order="C", copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ActivationSet:
    """Per-image feature vectors (images x units) with integer class labels.

    Construct via :func:`validate_activation_set`; the constructor itself
    performs no checks.
    """

    values: np.ndarray  # (num_images, num_units) float64
    labels: np.ndarray  # (num_images,) int64, each in [0, n_classes)
    class_names: tuple[str, ...]

    @property
    def num_images(self) -> int:
        return self.values.shape[0]

    @property
    def num_units(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass(frozen=True)
class RDM:
    """n x n symmetric dissimilarity matrix with zero diagonal."""

    values: np.ndarray  # (n, n) float64
    class_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class SimilarityReport:
    """Point estimate of the rank similarity plus its bootstrap spread."""

    point_estimate: float
    bootstrap_mean: float
    bootstrap_std: float
    replicates: int
    seed: int
    resampling_policy: str = "subsample_without_replacement_within_class"
    noise: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "point_estimate": self.point_estimate,
            "bootstrap_mean": self.bootstrap_mean,
            "bootstrap_std": self.bootstrap_std,
            "replicates": self.replicates,
            "seed": self.seed,
            "resampling_policy": self.resampling_policy,
            "noise": dict(self.noise),
        }


def validate_activation_set(values, labels, class_names) -> ActivationSet:
    """Validate raw inputs and return an immutable ActivationSet.

    Raises ShapeMismatch, EmptyClass, NonFiniteValue, DuplicateClassName or
    ClassOutOfRange on the first violated invariant. Inputs are copied,
    never mutated.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.ndim != 2:
        raise ShapeMismatch(f"values must be 2-D, got ndim={vals.ndim}")
    labs = np.asarray(labels, dtype=np.int64)
    if labs.ndim != 1 or labs.shape[0] != vals.shape[0]:
        raise ShapeMismatch(
            f"labels length {labs.shape} does not match {vals.shape[0]} rows"
        )
    names = tuple(str(c) for c in class_names)
    if len(set(names)) != len(names):
        seen, dup = set(), None
        for c in names:
            if c in seen:
                dup = c
                break
            seen.add(c)
        raise DuplicateClassName(f"duplicate class name {dup!r}")
    n = len(names)
    if labs.size and (labs.min() < 0 or labs.max() >= n):
        bad = labs[(labs < 0) | (labs >= n)][0]
        raise ClassOutOfRange(f"label {bad} outside [0, {n})")
    counts = np.bincount(labs, minlength=n)
    if (counts == 0).any():
        missing = int(np.flatnonzero(counts == 0)[0])
        raise EmptyClass(f"class {names[missing]!r} has no images")
    bad = ~np.isfinite(vals)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise NonFiniteValue(f"non-finite value at row {r}, col {c}")
    return ActivationSet(_frozen(vals), _frozen(labs, np.int64), names)


def class_subset(a: ActivationSet, i: int) -> np.ndarray:
    """Rows of a.values whose label equals i, in original row order."""
    if not 0 <= i < a.n_classes:
        raise ClassOutOfRange(f"class index {i} outside [0, {a.n_classes})")
    return a.values[a.labels == i]


def make_rdm(values: np.ndarray, class_names) -> RDM:
    """Wrap a dissimilarity matrix, enforcing the RDM invariants."""
    names = tuple(str(c) for c in class_names)
    vals = np.asarray(values, dtype=np.float64)
    n = len(names)
    if vals.shape != (n, n):
        raise ShapeMismatch(f"RDM shape {vals.shape} does not match {n} classes")
    if not np.array_equal(vals, vals.T):
        raise ShapeMismatch("RDM is not exactly symmetric")
    if np.abs(np.diag(vals)).max(initial=0.0) > DIAG_TOL:
        raise ShapeMismatch("RDM diagonal not zero")
    if vals.size and (vals.min() < -RANGE_TOL or vals.max() > 2.0 + RANGE_TOL):
        raise ShapeMismatch("RDM entries outside [0, 2]")
    return RDM(_frozen(vals), names)


def check_same_classes(a: RDM | ActivationSet, b: RDM | ActivationSet) -> None:
    if a.class_names != b.class_names:
        raise ClassMismatch(
            f"class names differ: {a.class_names} vs {b.class_names}"
        )
