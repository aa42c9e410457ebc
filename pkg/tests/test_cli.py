"""Command line interface: exit codes, output layout, reproducibility."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from rfl.cli import run

GAUSS_FLAGS = ["--kernel", "gaussian", "--sigma", "1.0", "--d", "1"]


def read(path: Path) -> str:
    return path.read_text()


def test_no_command_exits_2():
    assert run([]) == 2


def test_help_exits_0():
    assert run(["--help"]) == 0


def test_unknown_flag_exits_2():
    assert run(["rates", "--frequency", "3"]) == 2


def test_rates_happy_path(tmp_path):
    out = tmp_path / "r"
    code = run(["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8", "--out", str(out)])
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert report["command"] == "rates"
    assert report["config"]["m_list"] == [2, 4, 6, 8]
    assert report["study"]["slope"] < 0.0
    csv = read(out / "tables" / "rates.csv")
    lines = csv.strip().split("\n")
    assert lines[0] == "kernel,m,M,seed,sup_power"
    assert len(lines) == 5
    assert lines[1].startswith("gaussian(sigma=1.0,d=1),2,,,")
    assert not (out / "plots").exists()


def test_rates_plots(tmp_path):
    out = tmp_path / "rp"
    code = run(["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8", "--plots", "--out", str(out)])
    assert code == 0
    svg = read(out / "plots" / "rates.svg")
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")


def test_eigen_pinned_header_and_bool_cells(tmp_path):
    out = tmp_path / "e"
    code = run(
        ["eigen", "--kernel", "sobolev", "--r", "1.0", "--d", "1", "--m-list", "1,2,3", "--out", str(out)]
    )
    assert code == 0
    lines = read(out / "tables" / "eigen.csv").strip().split("\n")
    assert lines[0] == "kernel,m,d,lambda_min,m_gamma,m_pow_d_gamma,satisfied"
    assert len(lines) == 4
    for line in lines[1:]:
        assert line.endswith(",true")
    assert ",2,1," in lines[2]


def test_rerun_byte_identical(tmp_path):
    out = tmp_path / "rr"
    args = ["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8", "--out", str(out)]
    assert run(args) == 0
    first_json = read(out / "report.json")
    first_csv = read(out / "tables" / "rates.csv")
    assert run(args) == 0
    assert read(out / "report.json") == first_json
    assert read(out / "tables" / "rates.csv") == first_csv


def test_threads_do_not_change_tables(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8", "--out", str(a)]) == 0
    assert run(
        ["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8", "--threads", "2", "--out", str(b)]
    ) == 0
    assert read(a / "tables" / "rates.csv") == read(b / "tables" / "rates.csv")


def test_out_dir_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("RFL_OUT_DIR", str(tmp_path / "envroot"))
    code = run(["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8"])
    assert code == 0
    assert (tmp_path / "envroot" / "rates" / "report.json").exists()


def test_out_dir_cwd_fallback(tmp_path, monkeypatch):
    monkeypatch.delenv("RFL_OUT_DIR", raising=False)
    monkeypatch.chdir(tmp_path)
    code = run(["rates", *GAUSS_FLAGS, "--m-list", "2,4,6,8"])
    assert code == 0
    assert (tmp_path / "rfl_out" / "rates" / "report.json").exists()


def test_config_file_and_flag_override(tmp_path):
    cfg = {
        "kernel": {"family": "gaussian", "sigma": 1.0, "dim": 1},
        "m_list": [2, 4, 6, 8],
        "output_dir": str(tmp_path / "from_file"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run(["rates", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "from_file" / "report.json").exists()
    # flags win over file values
    assert run(["rates", "--config", str(cfg_path), "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "report.json").exists()


def test_config_file_errors(tmp_path):
    assert run(["rates", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["rates", "--config", str(bad)]) == 2
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    assert run(["rates", "--config", str(arr)]) == 2


def test_schema_rejections(tmp_path):
    # negative length-scale
    assert run(["rates", "--kernel", "gaussian", "--sigma", "-1", "--d", "1", "--m-list", "2,4,6,8"]) == 2
    # unknown config key
    extra = tmp_path / "extra.json"
    extra.write_text(
        json.dumps(
            {"kernel": {"family": "gaussian", "sigma": 1.0, "dim": 1}, "m_list": [2, 4, 6, 8], "bogus": 1}
        )
    )
    assert run(["rates", "--config", str(extra)]) == 2
    # m_list too short
    assert run(["rates", *GAUSS_FLAGS, "--m-list", "2,4", "--out", str(tmp_path / "x")]) == 2


def test_resource_limit_exits_2(tmp_path):
    code = run(["project", *GAUSS_FLAGS, "--m", "5000", "--out", str(tmp_path / "p")])
    assert code == 2


def test_unsupported_configuration_exits_2(tmp_path):
    code = run(
        ["meta", "--theorem", "multiquadric", "--M", "64", "--d", "5", "--out", str(tmp_path / "m")]
    )
    assert code == 2


def test_numerical_failure_exits_3(tmp_path):
    code = run(
        ["rates", "--kernel", "gaussian", "--sigma", "500", "--d", "1", "--m-list", "1,2,3,4", "--out", str(tmp_path / "f")]
    )
    assert code == 3


def test_project_certified_bound(tmp_path):
    out = tmp_path / "proj"
    code = run(
        ["project", *GAUSS_FLAGS, "--m", "4", "--n-samples", "25", "--seed", "1", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert report["max_ratio"] <= 1.0 + 1e-6
    lines = read(out / "tables" / "project.csv").strip().split("\n")
    assert lines[0] == "kernel,m,M,seed,sample,norm,sup_error,bound,ratio"
    assert len(lines) == 26


def test_train_loss_curve(tmp_path):
    out = tmp_path / "tr"
    code = run(
        [
            "train",
            *GAUSS_FLAGS,
            "--m", "2",
            "--weight", "sin2pi",
            "--link", "tanh",
            "--n-samples", "30",
            "--epochs", "4",
            "--widths", "8,8",
            "--out", str(out),
        ]
    )
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert report["train_report"]["epochs"] == 4
    assert report["functional"]["kind"] == "gflm"
    lines = read(out / "tables" / "loss_curve.csv").strip().split("\n")
    assert lines[0] == "kernel,m,M,seed,epoch,train_mse"
    assert len(lines) == 5


def test_train_inline_functional_json(tmp_path):
    out = tmp_path / "trf"
    code = run(
        [
            "train",
            *GAUSS_FLAGS,
            "--m", "2",
            "--functional", json.dumps({"kind": "l2_energy"}),
            "--n-samples", "30",
            "--epochs", "2",
            "--widths", "8,8",
            "--out", str(out),
        ]
    )
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert report["functional"]["kind"] == "l2_energy"


def test_flm_smoke(tmp_path):
    out = tmp_path / "flm"
    code = run(
        [
            "flm",
            *GAUSS_FLAGS,
            "--m-list", "1,2",
            "--n-samples", "20",
            "--epochs", "2",
            "--widths", "8,8",
            "--out", str(out),
        ]
    )
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert len(report["experiment"]["rows"]) == 2
    lines = read(out / "tables" / "flm.csv").strip().split("\n")
    assert lines[0].startswith("kernel,m,M,seed,term_I,term_II,total")
    assert len(lines) == 3


def test_meta_no_tables(tmp_path):
    out = tmp_path / "meta"
    code = run(["meta", "--theorem", "sobolev", "--M", "64", "--out", str(out)])
    assert code == 0
    report = json.loads(read(out / "report.json"))
    assert report["metadata"]["m"] == 2
    assert report["metadata"]["widths"] == [189, 196608000]
    assert isinstance(report["metadata"]["param_count_bound"], str)
    assert not (out / "tables").exists()
