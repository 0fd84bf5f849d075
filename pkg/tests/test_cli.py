"""Command-line behaviour: subcommands, exit codes, output round trips."""

import json

import pytest

from cfbench.cli import main
from cfbench.datasets import load


def write_config(tmp_path, **over):
    doc = {
        "run_id": "cli",
        "seed": 3,
        "data_dir": str(tmp_path / "data"),
        "model_dir": str(tmp_path / "models"),
        "output_dir": str(tmp_path / "out"),
        "dataset_spec": {
            "name": "tree-cycles",
            "params": {"n": 6, "nodes": 7, "max_cycles": 1, "seed": 2},
        },
        "oracle_spec": {"name": "nearest-centroid", "params": {}},
        "explainer_specs": [{"name": "dce"}],
        "figures": False,
    }
    doc.update(over)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


def test_list_names_every_component(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for kind in ("dataset:", "oracle:", "explainer:", "metric:"):
        assert kind in out
    for name in (
        "tree-cycles",
        "fixed-node-two-class",
        "nearest-centroid",
        "edge-rule",
        "dce",
        "obs",
        "dbs",
        "oracle_accuracy",
    ):
        assert name in out


def test_run_executes_and_prints_table(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "| Exp. |" in out and "| dce |" in out
    assert (tmp_path / "out" / "cli" / "records.csv").exists()


def test_run_missing_config_exits_1(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_run_invalid_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"run_id": "x"}))
    assert main(["run", "--config", str(bad)]) == 1
    assert "config.seed: required" in capsys.readouterr().err


def test_run_flag_overrides(tmp_path):
    cfg = write_config(tmp_path)
    assert main([
        "run", "--config", str(cfg),
        "--seed", "99", "--parallel", "2", "--out", str(tmp_path / "alt"),
    ]) == 0
    report = json.loads((tmp_path / "alt" / "cli" / "report.json").read_text())
    assert report["config"]["seed"] == 99
    assert report["config"]["parallelism"] == 2


def test_generate_dataset_writes_loadable_file(tmp_path, capsys):
    out = tmp_path / "made.jsonl"
    code = main([
        "generate-dataset", "--name", "tree-cycles",
        "--param", "n=10", "--param", "nodes=8",
        "--param", "max_cycles=2", "--param", "seed=4",
        "--out", str(out),
    ])
    assert code == 0
    d = load(out)
    assert len(d) == 10
    assert "10 instances" in capsys.readouterr().out


def test_generate_dataset_bad_params_exit_1(tmp_path, capsys):
    code = main([
        "generate-dataset", "--name", "tree-cycles",
        "--param", "n=10", "--out", str(tmp_path / "x.jsonl"),
    ])
    assert code == 1
    assert "missing params" in capsys.readouterr().err
    code = main([
        "generate-dataset", "--name", "tree-cycles",
        "--param", "oops", "--out", str(tmp_path / "x.jsonl"),
    ])
    assert code == 1


def test_report_round_trip_matches_run_output(tmp_path, capsys):
    cfg = write_config(tmp_path)
    main(["run", "--config", str(cfg)])
    capsys.readouterr()
    run_dir = tmp_path / "out" / "cli"
    assert main(["report", "--input", str(run_dir / "report.json"), "--format", "markdown"]) == 0
    md = capsys.readouterr().out
    assert md == (run_dir / "report.md").read_text()
    assert main(["report", "--input", str(run_dir / "report.json"), "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert csv_text == (run_dir / "records.csv").read_text()


def test_report_missing_input_exits_1(tmp_path, capsys):
    assert main(["report", "--input", str(tmp_path / "gone.json"), "--format", "csv"]) == 1


def test_usage_error_exits_nonzero(capsys):
    with pytest.raises(SystemExit):
        main(["report", "--format", "csv"])  # --input is required
