"""Export named-layer activations of torchvision models to activation CSV.

The output file format is the one the repsim toolkit consumes: a
"label,u0,u1,..." header, one row per image, labels taken from the class
subdirectory names, floats printed with 17 significant digits.
"""

from .extract import (
    ExtractionError,
    LayerNotFound,
    ManifestInvalid,
    ModelNotFound,
    UndecodableImage,
    extract,
    load_manifest,
)

__all__ = [
    "ExtractionError",
    "LayerNotFound",
    "ManifestInvalid",
    "ModelNotFound",
    "UndecodableImage",
    "extract",
    "load_manifest",
]

__version__ = "0.1.0"
