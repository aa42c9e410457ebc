"""Dataset generation, error decomposition, rate studies, and metadata."""

from __future__ import annotations

import math

import numpy as np
import pytest

from rfl import (
    ArgumentError,
    Dataset,
    DivergenceError,
    Kernel,
    TargetFunctional,
    TrainConfig,
    TrainReport,
    UnsupportedConfigurationError,
    error_decomposition,
    flm_experiment,
    generate_dataset,
    kernel_label,
    rate_study_eigen,
    rate_study_power,
    theorem_metadata,
)

GAUSS = Kernel("gaussian", sigma=1.0, dim=1)
ENERGY = TargetFunctional(kind="l2_energy")


def test_kernel_label():
    assert kernel_label(GAUSS) == "gaussian(sigma=1.0,d=1)"
    assert (
        kernel_label(Kernel("inverse_multiquadric", sigma=1.0, beta=1.5, dim=2))
        == "inverse_multiquadric(sigma=1.0,beta=1.5,d=2)"
    )
    assert kernel_label(Kernel("sobolev", r=2.0, dim=1)) == "sobolev(r=2.0,d=1)"


def test_generate_dataset_shapes_and_split():
    ds = generate_dataset(GAUSS, ENERGY, m=2, n_samples=50, seed=7)
    assert isinstance(ds, Dataset)
    assert len(ds) == 50
    assert ds.n_train == 40
    assert ds.inputs.shape == (50, 3)
    assert ds.targets.shape == (50,)
    assert ds.train_x.shape == (40, 3)
    assert ds.heldout_x.shape == (10, 3)
    assert ds.grid.grid_m == 2
    assert len(ds.functions) == 50


def test_generate_dataset_rows_recompute():
    ds = generate_dataset(GAUSS, ENERGY, m=2, n_samples=10, seed=3)
    for i in (0, 4, 9):
        f = ds.functions[i]
        assert np.array_equal(ds.inputs[i], f.eval_at(ds.grid.points))
        assert ds.targets[i] == ENERGY.value(f)


def test_generate_dataset_deterministic():
    a = generate_dataset(GAUSS, ENERGY, m=2, n_samples=20, seed=11)
    b = generate_dataset(GAUSS, ENERGY, m=2, n_samples=20, seed=11)
    assert np.array_equal(a.inputs, b.inputs)
    assert np.array_equal(a.targets, b.targets)
    c = generate_dataset(GAUSS, ENERGY, m=2, n_samples=20, seed=12)
    assert not np.array_equal(a.inputs, c.inputs)


def test_generate_dataset_validation():
    with pytest.raises(ArgumentError):
        generate_dataset(GAUSS, ENERGY, m=2, n_samples=0, seed=0)
    with pytest.raises(ArgumentError):
        generate_dataset(GAUSS, ENERGY, m=2, n_samples=10, seed=0, holdout_fraction=1.0)


def test_dataset_csv():
    ds = generate_dataset(GAUSS, ENERGY, m=1, n_samples=5, seed=0)
    lines = ds.to_csv().strip().split("\n")
    assert lines[0] == "x0,x1,y,split"
    assert len(lines) == 6
    assert lines[1].endswith("train")
    assert lines[-1].endswith("heldout")


def test_error_decomposition_triangle_and_fields():
    config = TrainConfig(epochs=5, widths=(8, 8), seed=0)
    dec = error_decomposition(GAUSS, ENERGY, m=2, n_samples=40, train_config=config)
    assert dec.total <= dec.term_I + dec.term_II + 1e-10
    assert dec.term_I >= 0.0 and dec.term_II >= 0.0 and dec.total >= 0.0
    assert dec.c_f == ENERGY.holder_constant(GAUSS)
    assert dec.power_sup > 0.0
    assert isinstance(dec.train_report, TrainReport)
    assert dec.to_json()["term_I"] == dec.term_I


def test_error_decomposition_accepts_prebuilt_dataset():
    config = TrainConfig(epochs=5, widths=(8, 8), seed=0)
    ds = generate_dataset(GAUSS, ENERGY, m=2, n_samples=40, seed=config.seed)
    direct = error_decomposition(GAUSS, ENERGY, m=2, n_samples=40, train_config=config)
    reused = error_decomposition(
        GAUSS, ENERGY, m=2, n_samples=40, train_config=config, dataset=ds
    )
    assert reused.term_I == direct.term_I
    assert reused.term_II == direct.term_II
    assert reused.total == direct.total


def test_rate_study_power_sobolev_frozen():
    study = rate_study_power(Kernel("sobolev", r=2.0, dim=1), [4, 8, 16, 32, 64])
    assert study.fit_kind == "log_sup_sq_vs_log_m"
    assert study.slope == pytest.approx(-2.8235345161454632, rel=1e-6)
    assert study.r_squared >= 0.999
    assert all(b < a for a, b in zip(study.sups, study.sups[1:]))
    assert study.eval_resolution is None
    header, rows = study.table()
    assert header == ["kernel", "m", "M", "seed", "sup_power"]
    assert len(rows) == 5
    assert rows[0][0] == "sobolev(r=2.0,d=1)"
    assert rows[0][1] == 4


def test_rate_study_power_multiquadric():
    study = rate_study_power(
        Kernel("inverse_multiquadric", sigma=1.0, beta=1.0, dim=1), [2, 4, 6, 8]
    )
    assert study.fit_kind == "log_sup_sq_vs_m"
    assert study.slope < 0.0
    assert study.r_squared >= 0.95


def test_rate_study_power_gaussian():
    study = rate_study_power(GAUSS, [2, 4, 6, 8])
    assert study.fit_kind == "log_sup_sq_vs_m_log_m"
    assert study.ratios_strictly_decreasing
    assert len(study.ratios) == 3
    assert study.ratios[0] == pytest.approx(
        study.sups[1] / study.sups[0], rel=1e-12
    )


def test_rate_study_power_threads_match():
    serial = rate_study_power(GAUSS, [2, 4, 6, 8], threads=1)
    parallel = rate_study_power(GAUSS, [2, 4, 6, 8], threads=2)
    assert serial.sups == parallel.sups
    assert serial.slope == parallel.slope


def test_rate_study_power_validation():
    with pytest.raises(ArgumentError):
        rate_study_power(GAUSS, [2, 4, 6])
    with pytest.raises(ArgumentError):
        rate_study_power(GAUSS, [2, 4, 4, 8])


def test_rate_study_power_divergence():
    # an extremely flat kernel pins every sup at the jitter floor, so the
    # fitted slope is nonnegative
    flat = Kernel("gaussian", sigma=500.0, dim=1)
    with pytest.raises(DivergenceError):
        rate_study_power(flat, [1, 2, 3, 4])


def test_rate_study_eigen():
    study = rate_study_eigen(Kernel("sobolev", r=1.0, dim=1), [1, 2, 3])
    assert study.d == 1
    assert [r.m for r in study.reports] == [1, 2, 3]
    assert all(r.bound_satisfied for r in study.reports)
    header, rows = study.table()
    assert header == [
        "kernel",
        "m",
        "d",
        "lambda_min",
        "m_gamma",
        "m_pow_d_gamma",
        "satisfied",
    ]
    assert rows[1][1] == 2
    assert rows[1][6] is True
    obj = study.to_json()
    assert len(obj["reports"]) == 3


def test_flm_experiment_smoke():
    config = TrainConfig(epochs=3, widths=(8, 8), seed=0)
    exp = flm_experiment("sin2pi", "tanh", GAUSS, [1, 2], config, n_samples=30)
    assert [r.m for r in exp.rows] == [1, 2]
    assert exp.rows[0].n_nodes == 2
    assert exp.rows[1].n_nodes == 3
    for row in exp.rows:
        assert row.total <= row.term_I + row.term_II + 1e-10
        assert row.c_f == pytest.approx(math.sqrt(0.5), rel=1e-12)
        assert row.c_g >= row.c_f
        assert row.power_sup > 0.0
    assert isinstance(exp.sup_trend_nonincreasing, bool)
    assert exp.wall_time > 0.0
    header, rows = exp.table()
    assert header[:4] == ["kernel", "m", "M", "seed"]
    assert len(rows) == 2
    assert exp.to_json()["n_samples"] == 30


def test_theorem_metadata_sobolev_frozen():
    meta = theorem_metadata("sobolev", 64)
    assert meta["m"] == 2
    assert meta["N"] == 3
    assert meta["widths"] == [189, 196608000]
    # M^{-(2r-d)/(2(2r-1))} = 64^{-1/2}
    assert meta["error_bound_factor"] == pytest.approx(0.125, rel=1e-12)
    # parameter count recomputed from the schedule formula
    w1, w2 = meta["widths"]
    assert meta["param_count_bound"] == w1 * 4 + w2 * (w1 + 1) + w2
    assert meta["param_count_bound_float"] == float(meta["param_count_bound"])
    assert meta["params"]["r"] == 2.0


def test_theorem_metadata_multiquadric_frozen():
    meta = theorem_metadata("multiquadric", 22026)
    assert meta["m"] == 1
    assert meta["N"] == 2
    assert meta["theorem"] == "multiquadric"
    assert meta["error_bound_factor"] > 0.0


def test_theorem_metadata_gaussian():
    ms = [theorem_metadata("gaussian", M)["m"] for M in (100, 10000, 1000000)]
    assert all(m >= 1 for m in ms)
    assert all(b >= a for a, b in zip(ms, ms[1:]))
    meta = theorem_metadata("gaussian", 100, params={"sigma": 0.5})
    assert meta["N"] == (meta["m"] + 1) ** meta["params"]["d"]
    assert isinstance(meta["m_expression"], str)
    assert isinstance(meta["error_bound_expression"], str)


def test_theorem_metadata_validation():
    with pytest.raises(ArgumentError):
        theorem_metadata("fourier", 64)
    with pytest.raises(ArgumentError):
        theorem_metadata("sobolev", 1)
    with pytest.raises(ArgumentError):
        theorem_metadata("sobolev", 64, params={"s": 1.5})
    with pytest.raises(UnsupportedConfigurationError):
        theorem_metadata("multiquadric", 64, params={"d": 5})
