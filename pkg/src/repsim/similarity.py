"""Spearman rank similarity between dissimilarity matrices and its bootstrap.

The headline metric is the Spearman rank correlation between the
upper-triangular, off-diagonal elements of a model RDM and a reference RDM.
Ties receive fractional (average) ranks and the correlation is computed as
Pearson on ranks, which stays correct under ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ActivationSet,
    RDM,
    SimilarityReport,
    check_same_classes,
)
from .errors import (
    ConstantInput,
    LabelMismatch,
    LengthMismatch,
    TooFewClasses,
    TooFewImages,
)
from .noise import NoiseSpec, apply_noise
from .rdm import rdm_from_activations


@dataclass(frozen=True)
class UpperTriangleVector:
    values: np.ndarray  # length n*(n-1)/2
    n: int


def upper_triangle(r: RDM) -> UpperTriangleVector:
    """Above-diagonal elements in row-major order: (0,1),(0,2),...,(1,2),..."""
    n = r.n
    if n < 3:
        raise TooFewClasses(f"need at least 3 classes, got {n}")
    iu = np.triu_indices(n, k=1)
    return UpperTriangleVector(r.values[iu], n)


def fractional_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the average of the ranks they span."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation with average-rank tie handling."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"shapes {x.shape} vs {y.shape}")
    if len(x) < 3:
        raise LengthMismatch(f"need at least 3 elements, got {len(x)}")
    rx = fractional_ranks(x)
    ry = fractional_ranks(y)
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    vx = np.dot(cx, cx)
    vy = np.dot(cy, cy)
    if vx == 0.0 or vy == 0.0:
        raise ConstantInput("rank correlation undefined for constant input")
    return float(np.dot(cx, cy) / np.sqrt(vx * vy))


def s_it(model_rdm: RDM, reference_rdm: RDM) -> float:
    """Rank similarity of two RDMs over their upper triangles."""
    check_same_classes(model_rdm, reference_rdm)
    return spearman(
        upper_triangle(model_rdm).values, upper_triangle(reference_rdm).values
    )


def _replicate_rng(seed: int, k: int) -> np.random.Generator:
    # counter-based split: replicate k gets an independent stream keyed
    # by (seed, k), so results do not depend on evaluation order
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(k,))
    )


def _subsample(a: ActivationSet, idx: np.ndarray) -> ActivationSet:
    return ActivationSet(a.values[idx], a.labels[idx], a.class_names)


def bootstrap_s_it(
    model: ActivationSet,
    reference: ActivationSet,
    noise: NoiseSpec,
    replicates: int,
    images_per_class: int,
    seed: int,
) -> SimilarityReport:
    """Bootstrap distribution of the rank similarity under subsampling + noise.

    Each replicate draws images_per_class indices per class without
    replacement (the same indices applied to both sets), perturbs the model
    activations only, and recomputes both RDMs. The point estimate is
    computed once on the full data without noise. The reported std is the
    population standard deviation over replicates.
    """
    if replicates < 1:
        raise TooFewImages(f"replicates must be >= 1, got {replicates}")
    check_same_classes(model, reference)
    if not np.array_equal(model.labels, reference.labels):
        raise LabelMismatch("model and reference must describe the same images")
    smallest = int(model.class_sizes().min())
    if not 1 <= images_per_class <= smallest:
        raise TooFewImages(
            f"images_per_class {images_per_class} outside [1, {smallest}]"
        )

    point = s_it(rdm_from_activations(model), rdm_from_activations(reference))

    per_class_rows = [
        np.flatnonzero(model.labels == i) for i in range(model.n_classes)
    ]
    values = np.empty(replicates)
    for k in range(replicates):
        rng = _replicate_rng(seed, k)
        idx = np.concatenate(
            [
                rng.choice(rows, size=images_per_class, replace=False)
                for rows in per_class_rows
            ]
        )
        sub_model = apply_noise(_subsample(model, idx), noise, rng)
        sub_ref = _subsample(reference, idx)
        values[k] = s_it(
            rdm_from_activations(sub_model), rdm_from_activations(sub_ref)
        )

    return SimilarityReport(
        point_estimate=point,
        bootstrap_mean=float(values.mean()),
        bootstrap_std=float(values.std()),
        replicates=replicates,
        seed=seed,
        noise=noise.to_dict(),
    )
