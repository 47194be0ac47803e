"""Deterministic activation extraction from a class-per-directory image corpus.

The manifest (JSON) names a torchvision model, the layer whose output to
record, the image root, and the preprocessing parameters verbatim:

    {
      "model_name": "alexnet",
      "layer": "classifier.4",
      "image_root": "images/",
      "weights": "pretrained",          # or "random" with "seed"
      "seed": 0,
      "preprocessing": {
        "resize": 256, "crop": 224,
        "mean": [0.485, 0.456, 0.406], "std": [0.229, 0.224, 0.225]
      }
    }

Inference mode is mandatory (dropout and batch norm frozen) and no
augmentation is applied, so repeated extraction is bitwise identical.
"weights": "random" exists for offline environments where the public
pretrained weights cannot be downloaded; the seed makes it reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torchvision.models
import torchvision.transforms.functional as TF
from PIL import Image

FLOAT_FMT = "%.17g"
DEFAULT_PREPROCESSING = {
    "resize": 256,
    "crop": 224,
    "mean": [0.485, 0.456, 0.406],
    "std": [0.229, 0.224, 0.225],
}
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tiff", ".webp"}


class ExtractionError(Exception):
    pass


class ManifestInvalid(ExtractionError):
    pass


class ModelNotFound(ExtractionError):
    pass


class LayerNotFound(ExtractionError):
    pass


class UndecodableImage(ExtractionError):
    pass


@dataclass(frozen=True)
class ExtractionManifest:
    model_name: str
    layer: str
    image_root: str
    weights: str = "pretrained"  # "pretrained" | "random"
    seed: int = 0
    batch_size: int = 16
    preprocessing: dict = field(
        default_factory=lambda: dict(DEFAULT_PREPROCESSING)
    )


MANIFEST_KEYS = set(ExtractionManifest.__dataclass_fields__)
PREPROCESSING_KEYS = set(DEFAULT_PREPROCESSING)


def load_manifest(path: str) -> ExtractionManifest:
    with open(path, encoding="utf-8") as f:
        obj = json.load(f)
    if not isinstance(obj, dict):
        raise ManifestInvalid("manifest must be a JSON object")
    unknown = set(obj) - MANIFEST_KEYS
    if unknown:
        raise ManifestInvalid(f"unknown manifest keys: {sorted(unknown)}")
    for key in ("model_name", "layer", "image_root"):
        if key not in obj:
            raise ManifestInvalid(f"manifest missing required key {key!r}")
    pre = dict(DEFAULT_PREPROCESSING)
    pre.update(obj.get("preprocessing", {}))
    unknown = set(pre) - PREPROCESSING_KEYS
    if unknown:
        raise ManifestInvalid(f"unknown preprocessing keys: {sorted(unknown)}")
    if obj.get("weights", "pretrained") not in ("pretrained", "random"):
        raise ManifestInvalid("weights must be 'pretrained' or 'random'")
    obj = dict(obj)
    obj["preprocessing"] = pre
    return ExtractionManifest(**obj)


def _load_model(manifest: ExtractionManifest) -> torch.nn.Module:
    try:
        if manifest.weights == "pretrained":
            model = torchvision.models.get_model(
                manifest.model_name, weights="DEFAULT"
            )
        else:
            torch.manual_seed(manifest.seed)
            model = torchvision.models.get_model(manifest.model_name, weights=None)
    except ValueError as e:
        raise ModelNotFound(f"{manifest.model_name!r}: {e}") from None
    except Exception as e:  # weight download failure etc.
        raise ModelNotFound(
            f"could not load weights for {manifest.model_name!r}: {e}"
        ) from None
    model.eval()
    return model


def _list_corpus(root: str) -> list[tuple[str, Path]]:
    """(class name, image path) pairs, sorted for a stable row order."""
    root_path = Path(root)
    if not root_path.is_dir():
        raise ManifestInvalid(f"image_root {root!r} is not a directory")
    class_dirs = sorted(p for p in root_path.iterdir() if p.is_dir())
    if not class_dirs:
        raise ManifestInvalid(f"image_root {root!r} has no class subdirectories")
    pairs = []
    for d in class_dirs:
        images = sorted(
            p for p in d.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
        )
        if not images:
            raise ManifestInvalid(f"class directory {d.name!r} has no images")
        pairs.extend((d.name, p) for p in images)
    return pairs


def _preprocess(path: Path, pre: dict) -> torch.Tensor:
    try:
        with Image.open(path) as img:
            img = img.convert("RGB")
    except Exception as e:
        raise UndecodableImage(f"{path}: {e}") from None
    img = TF.resize(img, pre["resize"])
    img = TF.center_crop(img, pre["crop"])
    t = TF.to_tensor(img)
    return TF.normalize(t, pre["mean"], pre["std"])


def extract_activations(
    manifest: ExtractionManifest,
) -> tuple[list[str], np.ndarray]:
    """Run the corpus through the model; returns (labels, activations).

    Activations are the named layer's output in inference mode, flattened
    per image, as float64.
    """
    model = _load_model(manifest)
    modules = dict(model.named_modules())
    if manifest.layer not in modules:
        raise LayerNotFound(
            f"layer {manifest.layer!r} not in model "
            f"{manifest.model_name!r} (has e.g. {sorted(modules)[:8]}...)"
        )
    captured: list[torch.Tensor] = []

    def hook(_module, _inputs, output):
        captured.append(output.detach())

    handle = modules[manifest.layer].register_forward_hook(hook)
    torch.set_num_threads(1)  # keeps CPU reductions bitwise reproducible
    pairs = _list_corpus(manifest.image_root)
    labels = [name for name, _ in pairs]
    chunks = []
    try:
        with torch.no_grad():
            for start in range(0, len(pairs), manifest.batch_size):
                batch_pairs = pairs[start : start + manifest.batch_size]
                batch = torch.stack(
                    [_preprocess(p, manifest.preprocessing) for _, p in batch_pairs]
                )
                captured.clear()
                model(batch)
                if not captured:
                    raise LayerNotFound(
                        f"layer {manifest.layer!r} produced no output"
                    )
                acts = captured[-1].reshape(len(batch_pairs), -1)
                chunks.append(acts.to(torch.float64).numpy())
    finally:
        handle.remove()
    return labels, np.concatenate(chunks, axis=0)


def write_activation_file(path: str, labels: list[str], values: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(
            "label," + ",".join(f"u{i}" for i in range(values.shape[1])) + "\n"
        )
        for label, row in zip(labels, values):
            f.write(label + "," + ",".join(FLOAT_FMT % v for v in row) + "\n")


def extract(manifest: ExtractionManifest, output: str) -> int:
    """Extract and write the activation file; returns the number of rows."""
    labels, values = extract_activations(manifest)
    write_activation_file(output, labels, values)
    return len(labels)
