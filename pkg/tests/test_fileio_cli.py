import json

import numpy as np
import pytest

from repsim import fileio
from repsim.cli import main
from repsim.core import validate_activation_set
from repsim.errors import ParseError
from repsim.mlp import TrainConfig, init_model, train
from repsim.synth import SynthSpec, generate

from conftest import random_activation_set


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_activation_roundtrip_bitwise(tmp_path, rng):
    a = random_activation_set(rng)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    fileio.write_activations(p1, a)
    parsed = fileio.read_activations(p1)
    fileio.write_activations(p2, parsed)
    assert p1.read_bytes() == p2.read_bytes()
    np.testing.assert_array_equal(parsed.values, a.values)
    np.testing.assert_array_equal(parsed.labels, a.labels)


def test_label_mapping_first_appearance(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("label,u0,u1\nzebra,1,2\nape,3,4\nzebra,5,6\nape,0,1\n")
    a = fileio.read_activations(p)
    assert a.class_names == ("zebra", "ape")
    np.testing.assert_array_equal(a.labels, [0, 1, 0, 1])


@pytest.mark.parametrize(
    "content,match",
    [
        ("", "empty"),
        ("label,u0\n1.0,2.0,3.0\n", "ragged|label"),
        ("label,u0,u1\na,1.0\n", "ragged"),
        ("label,u0,u1\na,1.0,inf\na,1,1\n", "non-finite"),
        ("label,u0,u1\na,1.0,xyz\na,1,1\n", "unparseable"),
        ("label,u0,u0\na,1.0,2.0\n", "duplicate"),
        ("label,u0,u1\n", "no data"),
    ],
)
def test_parse_rejections(tmp_path, content, match):
    p = tmp_path / "bad.csv"
    p.write_text(content)
    with pytest.raises(ParseError, match=match):
        fileio.read_activations(p)


def test_rdm_roundtrip(tmp_path, rng):
    a = random_activation_set(rng)
    from repsim.rdm import rdm_from_activations

    r = rdm_from_activations(a)
    p = tmp_path / "r.csv"
    fileio.write_rdm(p, r)
    back = fileio.read_rdm(p)
    np.testing.assert_array_equal(back.values, r.values)
    assert back.class_names == r.class_names


def test_model_roundtrip(tmp_path):
    m = init_model((3, 5, 2), 7)
    p = tmp_path / "m.json"
    fileio.write_model(p, m)
    back = fileio.read_model(p)
    assert back.layer_dims == m.layer_dims
    for w1, w2 in zip(back.weights, m.weights):
        np.testing.assert_array_equal(w1, w2)


def test_cli_synth_rdm_truth_bitwise(tmp_path):
    acts = tmp_path / "acts.csv"
    truth = tmp_path / "truth.csv"
    out = tmp_path / "rdm.csv"
    assert run_cli(
        "synth", "--classes", 4, "--units", 8, "--images-per-class", 8,
        "--within-std", 0.0, "--seed", 3, "--output", acts, "--truth", truth,
    ) == 0
    assert run_cli("rdm", "--input", acts, "--output", out) == 0
    assert out.read_bytes() == truth.read_bytes()


def test_cli_rdm_seven_class_distinct_upper_triangle(tmp_path):
    acts = tmp_path / "acts.csv"
    out = tmp_path / "rdm.csv"
    run_cli(
        "synth", "--classes", 7, "--units", 16, "--images-per-class", 4,
        "--seed", 1, "--output", acts,
    )
    assert run_cli("rdm", "--input", acts, "--output", out) == 0
    r = fileio.read_rdm(out)
    assert r.n == 7
    iu = r.values[np.triu_indices(7, k=1)]
    assert len(set(iu.tolist())) == 21


def test_cli_rdm_degenerate_exit_code(tmp_path, capsys):
    acts = tmp_path / "acts.csv"
    acts.write_text(
        "label,u0,u1\na,1.0,1.0\na,1.0,1.0\nb,2.0,2.0\nb,2.0,2.0\n"
        "c,0.0,1.0\nc,1.0,0.0\n"
    )
    out = tmp_path / "rdm.csv"
    assert run_cli("rdm", "--input", acts, "--output", out) == 1
    assert "DegenerateClassMean" in capsys.readouterr().err


def test_cli_sit_self_similarity(tmp_path):
    acts = tmp_path / "acts.csv"
    out = tmp_path / "sit.json"
    run_cli(
        "synth", "--classes", 5, "--units", 12, "--images-per-class", 6,
        "--seed", 2, "--output", acts,
    )
    assert run_cli(
        "sit", "--model", acts, "--reference", acts,
        "--noise-amplitude", 0.0, "--replicates", 3, "--output", out,
    ) == 0
    report = json.loads(out.read_text())
    assert report["point_estimate"] == 1.0
    assert report["bootstrap_mean"] == 1.0
    assert report["parameters"]["replicates"] == 3
    assert report["resampling_policy"].startswith("subsample")


def test_cli_sit_rdm_inputs_point_only(tmp_path):
    acts = tmp_path / "acts.csv"
    truth = tmp_path / "truth.csv"
    out = tmp_path / "sit.json"
    run_cli(
        "synth", "--classes", 4, "--units", 8, "--images-per-class", 4,
        "--seed", 2, "--output", acts, "--truth", truth,
    )
    assert run_cli(
        "sit", "--model", truth, "--reference", truth, "--output", out
    ) == 0
    report = json.loads(out.read_text())
    assert report["point_estimate"] == 1.0
    assert report["bootstrap_mean"] is None


def test_cli_sit_reversed_structure(tmp_path):
    from repsim.core import make_rdm

    rng = np.random.default_rng(0)
    n = 5
    m = np.triu(rng.uniform(0.1, 1.9, (n, n)), k=1)
    m = m + m.T
    names = [f"c{i}" for i in range(n)]
    r1 = make_rdm(m, names)
    r2 = make_rdm(np.where(np.eye(n, dtype=bool), 0.0, 2.0 - m), names)
    p1, p2, out = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "s.json"
    fileio.write_rdm(p1, r1)
    fileio.write_rdm(p2, r2)
    assert run_cli("sit", "--model", p1, "--reference", p2, "--output", out) == 0
    assert json.loads(out.read_text())["point_estimate"] == -1.0


def test_cli_sit_class_mismatch_exit(tmp_path, capsys):
    a1 = tmp_path / "a.csv"
    a2 = tmp_path / "b.csv"
    out = tmp_path / "s.json"
    run_cli("synth", "--classes", 4, "--units", 6, "--images-per-class", 4,
            "--seed", 1, "--output", a1)
    run_cli("synth", "--classes", 5, "--units", 6, "--images-per-class", 4,
            "--seed", 1, "--output", a2)
    assert run_cli("sit", "--model", a1, "--reference", a2, "--output", out) == 1
    assert "ClassMismatch" in capsys.readouterr().err


def test_cli_train_epochs_zero_then_activations(tmp_path):
    acts = tmp_path / "acts.csv"
    run_cli("synth", "--classes", 3, "--units", 6, "--images-per-class", 4,
            "--seed", 4, "--output", acts)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"hidden_dims": [5], "epochs": 0, "seed": 9}))
    model_out = tmp_path / "model.json"
    metrics_out = tmp_path / "metrics.json"
    assert run_cli("train", "--config", cfg, "--data", acts,
                   "--model-out", model_out, "--metrics-out", metrics_out) == 0
    out = tmp_path / "pen.csv"
    assert run_cli("activations", "--model", model_out, "--data", acts,
                   "--output", out) == 0
    # oracle: penultimate activations of the seeded init
    data = fileio.read_activations(acts)
    expect, _ = train(data, TrainConfig(hidden_dims=(5,), epochs=0, seed=9))
    from repsim.mlp import penultimate_activations

    got = fileio.read_activations(out)
    np.testing.assert_array_equal(
        got.values, penultimate_activations(expect, data.values)
    )


def test_cli_train_rejects_unknown_config_key(tmp_path, capsys):
    acts = tmp_path / "acts.csv"
    run_cli("synth", "--classes", 3, "--units", 6, "--images-per-class", 4,
            "--seed", 4, "--output", acts)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epochs": 1, "momentum": 0.9}))
    assert run_cli("train", "--config", cfg, "--data", acts,
                   "--model-out", tmp_path / "m.json",
                   "--metrics-out", tmp_path / "t.json") == 1
    assert "momentum" in capsys.readouterr().err


def test_cli_readout(tmp_path):
    tr = tmp_path / "train.csv"
    te = tmp_path / "test.csv"
    out = tmp_path / "readout.json"
    run_cli("synth", "--classes", 4, "--units", 8, "--images-per-class", 16,
            "--within-std", 0.3, "--seed", 6, "--output", tr)
    run_cli("synth", "--classes", 4, "--units", 8, "--images-per-class", 8,
            "--within-std", 0.3, "--seed", 7, "--output", te)
    assert run_cli("readout", "--train", tr, "--test", te, "--c", 1.0,
                   "--seed", 0, "--output", out) == 0
    rep = json.loads(out.read_text())
    assert 0.0 <= rep["accuracy"] <= 1.0


def test_cli_report(tmp_path):
    ref = tmp_path / "ref.csv"
    run_cli("synth", "--classes", 4, "--units", 10, "--images-per-class", 10,
            "--within-std", 0.5, "--seed", 1, "--output", ref)
    reps = []
    for i, std in enumerate([0.5, 1.5]):
        p = tmp_path / f"rep{i}.csv"
        run_cli("synth", "--classes", 4, "--units", 10, "--images-per-class", 10,
                "--within-std", std, "--seed", 1, "--output", p)
        reps.append({"name": f"rep{i}", "layers": i + 1, "activations": str(p)})
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "reference": str(ref),
        "replicates": 5,
        "images_per_class": 8,
        "noise_amplitude": 0.0,
        "seed": 0,
        "svm": {"c": 1.0, "epochs": 5, "splits": 3},
        "representations": reps,
    }))
    out = tmp_path / "report.csv"
    assert run_cli("report", "--spec", spec, "--output", out) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "name,layers,s_it_mean,s_it_std,acc_mean,acc_std"
    assert lines[1].startswith("rep0,1,") and lines[2].startswith("rep1,2,")


def test_cli_report_rejects_unknown_key(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"reference": "x", "representations": [],
                                "bogus": 1}))
    assert run_cli("report", "--spec", spec, "--output", tmp_path / "o.csv") == 1
    assert "bogus" in capsys.readouterr().err


def test_cli_missing_file_exit_code(tmp_path, capsys):
    assert run_cli("rdm", "--input", tmp_path / "nope.csv",
                   "--output", tmp_path / "o.csv") == 1
