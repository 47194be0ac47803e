"""Command-line surface tying the pipeline together.

Subcommands: rdm, sit, synth, train, activations, readout, report.
All randomness is seeded and all floats use a canonical formatter, so any
invocation repeated with identical arguments produces bitwise-identical
output files. Diagnostics go to stderr; data goes to files only. Exit code
0 on success, 1 on any validation or computation error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio, mlp, svm, synth
from .core import ActivationSet, validate_activation_set, _frozen
from .errors import ConfigInvalid, RepsimError
from .noise import NoiseSpec
from .rdm import rdm_from_activations
from .similarity import bootstrap_s_it, s_it

DEFAULT_REPLICATES = 100
DEFAULT_NOISE_AMPLITUDE = 1.0
DEFAULT_NOISE_MODE = "per_unit_std"
DEFAULT_SEED = 0
DEFAULT_SVM_EPOCHS = 20


def _normalize_per_unit(a: ActivationSet) -> ActivationSet:
    """Z-score each unit across images; constant units are centered only."""
    mean = a.values.mean(axis=0)
    std = a.values.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return ActivationSet(_frozen((a.values - mean) / std), a.labels, a.class_names)


def cmd_rdm(args) -> None:
    acts = fileio.read_activations(args.input)
    if args.normalize == "per-unit":
        acts = _normalize_per_unit(acts)
    fileio.write_rdm(args.output, rdm_from_activations(acts))


def _load_rdm_or_activations(path: str):
    kind = fileio.sniff_format(path)
    if kind == "rdm":
        return fileio.read_rdm(path), None
    acts = fileio.read_activations(path)
    return rdm_from_activations(acts), acts


def cmd_sit(args) -> None:
    model_rdm, model_acts = _load_rdm_or_activations(args.model)
    ref_rdm, ref_acts = _load_rdm_or_activations(args.reference)
    noise = NoiseSpec(amplitude=args.noise_amplitude, mode=args.noise_mode)
    params = {
        "model": args.model,
        "reference": args.reference,
        "replicates": args.replicates,
        "images_per_class": args.images_per_class,
        "seed": args.seed,
        "noise": noise.to_dict(),
    }
    if model_acts is not None and ref_acts is not None:
        m = args.images_per_class or int(model_acts.class_sizes().min())
        report = bootstrap_s_it(
            model_acts, ref_acts, noise, args.replicates, m, args.seed
        )
        out = report.to_dict()
        out["images_per_class"] = m
    else:
        # RDM inputs carry no image-level data, so no resampling is possible
        out = {
            "point_estimate": s_it(model_rdm, ref_rdm),
            "bootstrap_mean": None,
            "bootstrap_std": None,
            "replicates": 0,
            "seed": args.seed,
            "resampling_policy": "none (rdm inputs)",
            "noise": noise.to_dict(),
        }
    out["parameters"] = params
    fileio.write_json(args.output, out)


def cmd_synth(args) -> None:
    spec = synth.SynthSpec(
        n_classes=args.classes,
        units=args.units,
        images_per_class=args.images_per_class,
        within_class_std=args.within_std,
        seed=args.seed,
    )
    acts, truth = synth.generate(spec)
    fileio.write_activations(args.output, acts)
    if args.truth:
        fileio.write_rdm(args.truth, truth)


def _train_config(obj: dict) -> mlp.TrainConfig:
    if not isinstance(obj, dict):
        raise ConfigInvalid("train config must be a JSON object")
    allowed = set(mlp.TrainConfig.__dataclass_fields__)
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
    if "hidden_dims" in obj:
        obj = dict(obj)
        obj["hidden_dims"] = tuple(obj["hidden_dims"])
    return mlp.TrainConfig(**obj)


def cmd_train(args) -> None:
    cfg = _train_config(fileio.read_json(args.config))
    data = fileio.read_activations(args.data)
    model, metrics = mlp.train(data, cfg)
    fileio.write_model(args.model_out, model)
    fileio.write_json(args.metrics_out, {"config": vars_config(cfg), "epochs": metrics})


def vars_config(cfg: mlp.TrainConfig) -> dict:
    d = {k: getattr(cfg, k) for k in mlp.TrainConfig.__dataclass_fields__}
    d["hidden_dims"] = list(d["hidden_dims"])
    return d


def cmd_activations(args) -> None:
    model = fileio.read_model(args.model)
    data = fileio.read_activations(args.data)
    acts = mlp.penultimate_activation_set(model, data)
    fileio.write_activations(args.output, acts)


def cmd_readout(args) -> None:
    train_set = fileio.read_activations(args.train)
    test_set = fileio.read_activations(args.test)
    model = svm.train_svm(train_set, args.c, args.epochs, args.seed)
    fileio.write_json(
        args.output,
        {
            "accuracy": svm.accuracy(model, test_set),
            "train_accuracy": svm.accuracy(model, train_set),
            "c": args.c,
            "epochs": args.epochs,
            "seed": args.seed,
        },
    )


REPORT_KEYS = {
    "reference",
    "representations",
    "replicates",
    "images_per_class",
    "noise_amplitude",
    "noise_mode",
    "seed",
    "svm",
}
REPORT_SVM_KEYS = {"c", "epochs", "splits", "test_fraction"}
REPORT_REP_KEYS = {"name", "layers", "activations"}


def cmd_report(args) -> None:
    spec = fileio.read_json(args.spec)
    if not isinstance(spec, dict):
        raise ConfigInvalid("report spec must be a JSON object")
    unknown = set(spec) - REPORT_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown report keys: {sorted(unknown)}")
    svm_cfg = dict(spec.get("svm", {}))
    unknown = set(svm_cfg) - REPORT_SVM_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown svm keys: {sorted(unknown)}")
    reference = fileio.read_activations(spec["reference"])
    noise = NoiseSpec(
        amplitude=spec.get("noise_amplitude", DEFAULT_NOISE_AMPLITUDE),
        mode=spec.get("noise_mode", DEFAULT_NOISE_MODE),
    )
    seed = spec.get("seed", DEFAULT_SEED)
    replicates = spec.get("replicates", DEFAULT_REPLICATES)
    rows = []
    for rep in spec["representations"]:
        unknown = set(rep) - REPORT_REP_KEYS
        if unknown:
            raise ConfigInvalid(f"unknown representation keys: {sorted(unknown)}")
        acts = fileio.read_activations(rep["activations"])
        m = spec.get("images_per_class") or int(acts.class_sizes().min())
        sim = bootstrap_s_it(acts, reference, noise, replicates, m, seed)
        acc_mean, acc_std, _ = svm.cross_validated_accuracy(
            acts,
            c=svm_cfg.get("c", 1.0),
            epochs=svm_cfg.get("epochs", DEFAULT_SVM_EPOCHS),
            seed=seed,
            splits=svm_cfg.get("splits", 5),
            test_fraction=svm_cfg.get("test_fraction", 0.3),
        )
        rows.append(
            (
                rep["name"],
                str(rep.get("layers", "")),
                sim.bootstrap_mean,
                sim.bootstrap_std,
                acc_mean,
                acc_std,
            )
        )
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        f.write("name,layers,s_it_mean,s_it_std,acc_mean,acc_std\n")
        for name, layers, sm, ss, am, asd in rows:
            f.write(
                ",".join(
                    [name, layers]
                    + [fileio.fmt_float(v) for v in (sm, ss, am, asd)]
                )
                + "\n"
            )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="repsim",
        description="Representational similarity toolkit",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("rdm", help="compute a dissimilarity matrix from activations")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--normalize", choices=["per-unit", "none"], default="none")
    sp.set_defaults(func=cmd_rdm)

    sp = sub.add_parser("sit", help="rank similarity between two representations")
    sp.add_argument("--model", required=True)
    sp.add_argument("--reference", required=True)
    sp.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    sp.add_argument("--images-per-class", type=int, default=None)
    sp.add_argument(
        "--noise-amplitude", type=float, default=DEFAULT_NOISE_AMPLITUDE
    )
    sp.add_argument(
        "--noise-mode",
        choices=["per_unit_std", "global_std"],
        default=DEFAULT_NOISE_MODE,
    )
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_sit)

    sp = sub.add_parser("synth", help="generate a synthetic activation set")
    sp.add_argument("--classes", type=int, default=synth.DEFAULT_CLASSES)
    sp.add_argument("--units", type=int, default=synth.DEFAULT_UNITS)
    sp.add_argument(
        "--images-per-class", type=int, default=synth.DEFAULT_IMAGES_PER_CLASS
    )
    sp.add_argument("--within-std", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--output", required=True)
    sp.add_argument("--truth", default=None)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("train", help="train the small classifier")
    sp.add_argument("--config", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--model-out", required=True)
    sp.add_argument("--metrics-out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser(
        "activations", help="export penultimate-layer activations of a model"
    )
    sp.add_argument("--model", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_activations)

    sp = sub.add_parser("readout", help="linear SVM accuracy of a representation")
    sp.add_argument("--train", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--c", type=float, default=1.0)
    sp.add_argument("--epochs", type=int, default=DEFAULT_SVM_EPOCHS)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_readout)

    sp = sub.add_parser("report", help="similarity + readout table for named reps")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--output", required=True)
    sp.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except RepsimError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
