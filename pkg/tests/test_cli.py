import os
from pathlib import Path

import pytest
import yaml

from oppcompose.cli import main
from oppcompose.experiments import load_spec
from oppcompose.mobility import load_trace_csv


def test_preset_writes_spec(tmp_path):
    rc = main(["preset", "fig3", "--out", str(tmp_path)])
    assert rc == 0
    spec = load_spec(tmp_path / "fig3.yaml")
    assert spec.name == "fig3"


def test_unknown_preset_exit_code(tmp_path):
    assert main(["preset", "fig99", "--out", str(tmp_path)]) == 2


def test_gen_trace(tmp_path):
    params = tmp_path / "levy.yaml"
    params.write_text(yaml.safe_dump({
        "n_nodes": 6,
        "duration": 1800.0,
        "area": [300.0, 300.0],
        "speed_classes": [[3, [1.0, 1.0]], [3, [10.0, 10.0]]],
    }))
    rc = main(["gen-trace", "levy", str(params), "--out", str(tmp_path), "--seed", "4",
               "--contacts"])
    assert rc == 0
    trace = load_trace_csv(tmp_path / "levy_seed4.csv")
    assert trace.n_nodes == 6
    assert (tmp_path / "levy_seed4_contacts.csv").exists()


def test_run_and_analyze_round_trip(tmp_path, monkeypatch):
    spec_file = tmp_path / "tiny.yaml"
    spec_file.write_text(yaml.safe_dump({
        "name": "tinycli",
        "mobility": {"model": "levy", "n_nodes": 8, "duration": 3600.0,
                     "sample_interval": 30.0,
                     "params": {"area": [300.0, 300.0],
                                "speed_classes": [[4, [1.0, 1.0]], [4, [10.0, 10.0]]]}},
        "catalog": {"n_d": 4, "excluded": [], "ring": False},
        "pattern": {"kind": "min_k", "k": 2},
        "sim": {"delay_warmup_s": 0.0},
        "repetition": 2,
        "variants": [{"name": "base", "overrides": {}}],
        "sweep": {},
        "seeds": 1,
    }))
    monkeypatch.setenv("OPPCOMPOSE_OUT", str(tmp_path))
    rc = main(["run", str(spec_file)])
    assert rc == 0
    summary = tmp_path / "tinycli" / "summary.csv"
    assert summary.exists()
    rc = main(["analyze", str(tmp_path / "tinycli"), "--estimate-accuracy"])
    assert rc == 0


def test_analyze_bound_check(tmp_path, capsys):
    spec_file = tmp_path / "ring.yaml"
    spec_file.write_text(yaml.safe_dump({
        "name": "ringcli",
        "mobility": {"model": "levy", "n_nodes": 8, "duration": 3600.0,
                     "sample_interval": 30.0,
                     "params": {"area": [250.0, 250.0],
                                "speed_classes": [[8, [2.0, 2.0]]]}},
        "catalog": {"n_d": 6, "excluded": [], "ring": True},
        "pattern": {"kind": "fixed_length", "length": 1},
        "sim": {"delay_warmup_s": 0.0},
        "repetition": 2,
        "variants": [{"name": "levy", "overrides": {}}],
        "sweep": {"pattern.length": [1, 2]},
        "seeds": 1,
    }))
    rc = main(["run", str(spec_file), "--out", str(tmp_path)])
    assert rc == 0
    rc = main(["analyze", str(tmp_path / "ringcli"), "--bound-check"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "levy" in out and "p1" in out
