"""Representational similarity toolkit.

Quantifies how similar two feature systems are via correlation-distance
dissimilarity matrices compared with Spearman rank correlation, with a
bootstrap over image subsamples and a measurement-noise model. Includes a
small decorrelation-regularized classifier, a linear SVM readout, and a
synthetic-data oracle.
"""

from .core import (
    ActivationSet,
    RDM,
    SimilarityReport,
    class_subset,
    validate_activation_set,
)
from .decov import batch_covariance, decov_gradient, decov_loss
from .noise import NoiseSpec, apply_noise
from .rdm import ClassMeans, class_mean, class_means, compute_rdm, rdm_from_activations
from .similarity import bootstrap_s_it, s_it, spearman, upper_triangle
from .synth import SynthSpec, generate, make_graded_family

__all__ = [
    "ActivationSet",
    "RDM",
    "SimilarityReport",
    "NoiseSpec",
    "SynthSpec",
    "ClassMeans",
    "apply_noise",
    "batch_covariance",
    "bootstrap_s_it",
    "class_mean",
    "class_means",
    "class_subset",
    "compute_rdm",
    "decov_gradient",
    "decov_loss",
    "generate",
    "make_graded_family",
    "rdm_from_activations",
    "s_it",
    "spearman",
    "upper_triangle",
    "validate_activation_set",
]

__version__ = "0.1.0"
