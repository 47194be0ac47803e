"""File formats: activation CSV, RDM CSV, JSON reports and model checkpoints.

All floats in CSV files are written with 17 significant digits so a
write/read/write round trip is bitwise identical. Activation files carry a
"label,u0,u1,..." header; RDM files carry a "class,<names...>" header with
class names repeated in the first column.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .core import ActivationSet, RDM, make_rdm, validate_activation_set
from .errors import ParseError
from .mlp import MLPModel

FLOAT_FMT = "%.17g"


def fmt_float(x: float) -> str:
    return FLOAT_FMT % x


def _parse_float(token: str, where: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"unparseable number {token!r} at {where}") from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {token!r} at {where}")
    return v


def _read_csv_lines(path: str) -> list[list[str]]:
    with open(path, encoding="utf-8", newline="") as f:
        text = f.read()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise ParseError(f"{path}: empty file")
    return [ln.split(",") for ln in lines]


def write_activations(path: str, a: ActivationSet) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("label," + ",".join(f"u{i}" for i in range(a.num_units)) + "\n")
        for row, lab in zip(a.values, a.labels):
            f.write(
                a.class_names[lab] + "," + ",".join(map(fmt_float, row)) + "\n"
            )


def read_activations(path: str) -> ActivationSet:
    """Parse an activation CSV; labels map to indices in first-appearance order."""
    rows = _read_csv_lines(path)
    header = rows[0]
    if header[0] != "label" or len(header) < 2:
        raise ParseError(f"{path}: header must start with 'label,u0,...'")
    if len(set(header)) != len(header):
        raise ParseError(f"{path}: duplicate header names")
    ncols = len(header)
    if len(rows) < 2:
        raise ParseError(f"{path}: no data rows")
    names: list[str] = []
    index: dict[str, int] = {}
    labels = []
    values = np.empty((len(rows) - 1, ncols - 1))
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != ncols:
            raise ParseError(
                f"{path}: ragged row {r} ({len(row)} columns, expected {ncols})"
            )
        name = row[0]
        if name not in index:
            index[name] = len(names)
            names.append(name)
        labels.append(index[name])
        for c, tok in enumerate(row[1:]):
            values[r - 1, c] = _parse_float(tok, f"{path} row {r} col {c + 1}")
    return validate_activation_set(values, labels, names)


def write_rdm(path: str, r: RDM) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("class," + ",".join(r.class_names) + "\n")
        for name, row in zip(r.class_names, r.values):
            f.write(name + "," + ",".join(map(fmt_float, row)) + "\n")


def read_rdm(path: str) -> RDM:
    rows = _read_csv_lines(path)
    header = rows[0]
    if header[0] != "class" or len(header) < 2:
        raise ParseError(f"{path}: header must start with 'class,<names...>'")
    names = header[1:]
    if len(set(names)) != len(names):
        raise ParseError(f"{path}: duplicate class names in header")
    n = len(names)
    if len(rows) != n + 1:
        raise ParseError(f"{path}: expected {n} data rows, got {len(rows) - 1}")
    values = np.empty((n, n))
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != n + 1:
            raise ParseError(f"{path}: ragged row {r}")
        if row[0] != names[r - 1]:
            raise ParseError(
                f"{path}: row label {row[0]!r} does not match header order"
            )
        for c, tok in enumerate(row[1:]):
            values[r - 1, c] = _parse_float(tok, f"{path} row {r} col {c + 1}")
    return make_rdm(values, names)


def sniff_format(path: str) -> str:
    """Return 'activations' or 'rdm' from the header's first field."""
    with open(path, encoding="utf-8") as f:
        first = f.readline().rstrip("\n").split(",")[0]
    if first == "label":
        return "activations"
    if first == "class":
        return "rdm"
    raise ParseError(f"{path}: unrecognized header (expected 'label' or 'class')")


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path: str):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def write_model(path: str, m: MLPModel) -> None:
    write_json(
        path,
        {
            "layer_dims": list(m.layer_dims),
            "weights": [w.tolist() for w in m.weights],
            "biases": [b.tolist() for b in m.biases],
        },
    )


def read_model(path: str) -> MLPModel:
    obj = read_json(path)
    try:
        dims = tuple(int(d) for d in obj["layer_dims"])
        weights = tuple(np.asarray(w, dtype=np.float64) for w in obj["weights"])
        biases = tuple(np.asarray(b, dtype=np.float64) for b in obj["biases"])
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{path}: invalid model checkpoint ({e})") from None
    return MLPModel(dims, weights, biases)
