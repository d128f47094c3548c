"""Command-line interface: subcommands, outputs, and exit codes."""

import json

import numpy as np
import pytest

from hypermag import dataio
from hypermag.cli import main


@pytest.fixture
def dataset(tmp_path):
    code = main(["generate", "--n", "40", "--classes", "2", "--edges-per-class",
                 "20", "--seed", "5", "--out", str(tmp_path / "data")])
    assert code == 0
    return tmp_path / "data"


def test_generate_writes_dataset(dataset):
    assert (dataset / "hypergraph.jsonl").exists()
    assert (dataset / "features.csv").exists()
    assert (dataset / "labels.csv").exists()
    h, edvw = dataio.load_hypergraph(dataset / "hypergraph.jsonl")
    assert h.n_vertices == 40
    assert edvw is not None


def test_walk_prints_diagnostics(dataset, capsys):
    code = main(["walk", "--hypergraph", str(dataset / "hypergraph.jsonl")])
    out = capsys.readouterr().out
    assert code == 0
    assert "stationary residual" in out
    assert "reversible: no" in out
    assert "max hitting time" in out


def test_walk_uniform_is_reversible(dataset, capsys):
    code = main(["walk", "--hypergraph", str(dataset / "hypergraph.jsonl"),
                 "--edvw", "uniform", "--lazy"])
    out = capsys.readouterr().out
    assert code == 0
    assert "reversible: yes" in out


def test_walk_matrix_export(dataset, tmp_path, capsys):
    target = tmp_path / "p.txt"
    code = main(["walk", "--hypergraph", str(dataset / "hypergraph.jsonl"),
                 "--out-matrix", str(target)])
    assert code == 0
    matrix = dataio.load_real_matrix(target)
    np.testing.assert_allclose(matrix.sum(axis=1), np.ones(40), atol=1e-10)


def test_laplacian_writes_complex_matrix(dataset, tmp_path, capsys):
    target = tmp_path / "lap.txt"
    code = main(["laplacian", "--hypergraph", str(dataset / "hypergraph.jsonl"),
                 "--charge", "q=0.25", "--renormalize", "--out", str(target)])
    out = capsys.readouterr().out
    assert code == 0
    assert "lambda_max" in out
    loaded = dataio.load_complex_matrix(target)
    assert np.abs(loaded - loaded.conj().T).max() <= 1e-12
    eigs = np.linalg.eigvalsh(loaded)
    assert eigs.min() >= -1 - 1e-8 and eigs.max() <= 1 + 1e-8


def test_train_and_baseline_report_accuracy(dataset, capsys):
    args = ["--hypergraph", str(dataset / "hypergraph.jsonl"),
            "--features", str(dataset / "features.csv"),
            "--labels", str(dataset / "labels.csv"),
            "--hidden", "8", "--epochs", "10", "--splits", "2"]
    assert main(["train", *args]) == 0
    out = capsys.readouterr().out
    assert "mean:" in out and "std:" in out
    assert main(["baseline", "--method", "gcn", *args]) == 0
    out = capsys.readouterr().out
    assert "model: gcn" in out


def test_experiment_subcommand(dataset, tmp_path, capsys):
    config = {
        "model": "hmn",
        "edvw": "file",
        "hypergraph_path": str(dataset / "hypergraph.jsonl"),
        "features_path": str(dataset / "features.csv"),
        "labels_path": str(dataset / "labels.csv"),
        "hidden_dims": 8,
        "epochs": 10,
        "n_splits": 2,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out_dir = tmp_path / "out"
    code = main(["experiment", "--config", str(cfg_path), "--out", str(out_dir)])
    assert code == 0
    assert (out_dir / "report.json").exists()
    assert "wrote" in capsys.readouterr().out


def test_missing_file_exits_2(capsys):
    code = main(["walk", "--hypergraph", "/nonexistent/h.jsonl"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"model": "nope", "generator": {}}))
    code = main(["experiment", "--config", str(cfg_path)])
    assert code == 2


def test_bad_charge_flag_exits_nonzero(dataset, capsys):
    with pytest.raises(SystemExit):
        main(["laplacian", "--hypergraph", str(dataset / "hypergraph.jsonl"),
              "--charge", "sideways", "--out", "/tmp/x.txt"])


def test_walk_without_file_edvw_exits_2(tmp_path, capsys):
    from hypermag import build_hypergraph
    h = build_hypergraph([[0, 1], [1, 2]])
    path = tmp_path / "plain.jsonl"
    dataio.save_hypergraph(path, h)
    code = main(["walk", "--hypergraph", str(path)])
    assert code == 2
    assert "no EDVW" in capsys.readouterr().err
