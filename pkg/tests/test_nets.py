"""Width schedule, forward pass, backprop, and the training loop."""

from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest

from rfl import (
    ArgumentError,
    DivergenceError,
    TanhNetwork,
    TrainConfig,
    TrainReport,
    forward,
    forward_batch,
    gradient,
    init,
    loss_mse,
    theoretical_widths,
    train,
)


def test_theoretical_widths_frozen():
    ws = theoretical_widths(1, 10)
    assert (ws.w1, ws.w2) == (9, 60)
    # 9 * 2 + 60 * 10 + 60
    assert ws.param_count_bound == 678
    ws2 = theoretical_widths(2, 25)
    assert (ws2.w1, ws2.w2) == (48, 93750)
    assert theoretical_widths(3, 46).w1 == 135


def test_theoretical_widths_hypothesis_warning():
    with pytest.warns(UserWarning):
        theoretical_widths(2, 20)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        theoretical_widths(2, 21)


def test_theoretical_widths_validation():
    with pytest.raises(ArgumentError):
        theoretical_widths(0, 10)
    with pytest.raises(ArgumentError):
        theoretical_widths(1, 1)


def test_init_shapes_and_glorot_bounds():
    net = init(3, (7, 5), seed=0)
    assert net.input_dim == 3
    assert net.W1.shape == (7, 3)
    assert net.b1.shape == (7,)
    assert net.W2.shape == (5, 7)
    assert net.b2.shape == (5,)
    assert net.a.shape == (5,)
    assert np.all(net.b1 == 0.0) and np.all(net.b2 == 0.0)
    assert np.abs(net.W1).max() <= math.sqrt(6.0 / (3 + 7))
    assert np.abs(net.W2).max() <= math.sqrt(6.0 / (7 + 5))
    assert np.abs(net.a).max() <= math.sqrt(6.0 / (5 + 1))
    assert net.widths == (7, 5)
    assert net.param_count == 7 * 3 + 7 + 5 * 7 + 5 + 5


def test_init_deterministic():
    a = init(2, (4, 4), seed=9)
    b = init(2, (4, 4), seed=9)
    for pa, pb in zip(a.parameters(), b.parameters()):
        assert np.array_equal(pa, pb)
    c = init(2, (4, 4), seed=10)
    assert not np.array_equal(a.W1, c.W1)


def test_init_validation():
    with pytest.raises(ArgumentError):
        init(0, (4, 4), seed=0)
    with pytest.raises(ArgumentError):
        init(2, (0, 4), seed=0)


def test_forward_frozen_composition():
    net = TanhNetwork(
        input_dim=1,
        W1=np.array([[1.0]]),
        b1=np.zeros(1),
        W2=np.array([[1.0]]),
        b2=np.zeros(1),
        a=np.array([1.0]),
    )
    assert forward(net, np.array([0.5])) == pytest.approx(
        0.4318081805950961, rel=1e-15
    )
    assert forward(net, np.array([0.0])) == 0.0


def test_forward_batch_matches_single():
    net = init(4, (6, 5), seed=1)
    rng = np.random.default_rng(2)
    X = rng.standard_normal((10, 4))
    batch = forward_batch(net, X)
    for i in range(10):
        assert batch[i] == pytest.approx(forward(net, X[i]), rel=1e-14)


def test_output_bounded_by_outer_weights():
    net = init(3, (8, 8), seed=4)
    bound = float(np.abs(net.a).sum())
    rng = np.random.default_rng(5)
    X = rng.uniform(-50, 50, (200, 3))
    assert np.abs(forward_batch(net, X)).max() <= bound


def test_forward_validation():
    net = init(3, (4, 4), seed=0)
    with pytest.raises(ArgumentError):
        forward(net, np.array([1.0, 2.0]))
    with pytest.raises(ArgumentError):
        forward_batch(net, np.zeros((2, 4)))


def test_gradient_matches_central_differences():
    net = init(2, (5, 4), seed=3)
    rng = np.random.default_rng(6)
    X = rng.standard_normal((6, 2))
    y = rng.standard_normal(6)
    grads = gradient(net, X, y)

    def loss():
        return 0.5 * loss_mse(net, X, y)

    eps = 1e-6
    for p, g in zip(net.parameters(), grads):
        flat_p = p.ravel()
        flat_g = g.ravel()
        for idx in range(flat_p.size):
            orig = flat_p[idx]
            flat_p[idx] = orig + eps
            up = loss()
            flat_p[idx] = orig - eps
            down = loss()
            flat_p[idx] = orig
            fd = (up - down) / (2.0 * eps)
            denom = max(abs(fd), abs(flat_g[idx]), 1e-10)
            assert abs(fd - flat_g[idx]) / denom <= 1e-6


def test_gradient_validation():
    net = init(2, (3, 3), seed=0)
    with pytest.raises(ArgumentError):
        gradient(net, np.zeros((0, 2)), np.zeros(0))
    with pytest.raises(ArgumentError):
        gradient(net, np.zeros((3, 2)), np.zeros(2))


def test_loss_mse():
    net = init(2, (3, 3), seed=0)
    X = np.zeros((4, 2))
    y = np.full(4, 2.0)
    # net output at 0 is 0, so the MSE is 4
    assert loss_mse(net, X, y) == pytest.approx(4.0, rel=1e-12)


def tiny_dataset(n=256, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, (n, 1))
    y = 0.3 * np.sin(2.0 * x[:, 0])
    cut = int(0.8 * n)
    return SimpleNamespace(
        train_x=x[:cut], train_y=y[:cut], heldout_x=x[cut:], heldout_y=y[cut:]
    )


def test_train_reduces_loss_and_reports():
    data = tiny_dataset()
    net = init(1, (16, 16), seed=0)
    before = loss_mse(net, data.train_x, data.train_y)
    config = TrainConfig(epochs=60, widths=(16, 16), seed=0)
    report = train(net, data, config)
    assert report.final_train_mse < before / 10.0
    assert len(report.loss_curve) == 60
    assert report.loss_curve[-1] == pytest.approx(report.final_train_mse, rel=1e-12)
    assert report.param_count == net.param_count
    assert report.epochs == 60
    assert report.seed == 0
    assert math.isfinite(report.heldout_sup_error)
    assert report.heldout_mean_abs <= report.heldout_sup_error


def test_train_deterministic():
    data = tiny_dataset()
    config = TrainConfig(epochs=20, widths=(8, 8), seed=5)
    net_a = init(1, (8, 8), seed=1)
    rep_a = train(net_a, data, config)
    net_b = init(1, (8, 8), seed=1)
    rep_b = train(net_b, data, config)
    assert rep_a.loss_curve == rep_b.loss_curve
    for pa, pb in zip(net_a.parameters(), net_b.parameters()):
        assert np.array_equal(pa, pb)


def test_train_zero_epochs():
    data = tiny_dataset()
    net = init(1, (4, 4), seed=0)
    before = loss_mse(net, data.train_x, data.train_y)
    report = train(net, data, TrainConfig(epochs=0, widths=(4, 4)))
    assert report.loss_curve == []
    assert report.final_train_mse == pytest.approx(before, rel=1e-14)


def test_train_empty_heldout_gives_nan():
    data = tiny_dataset()
    data.heldout_x = np.zeros((0, 1))
    data.heldout_y = np.zeros(0)
    report = train(init(1, (4, 4), seed=0), data, TrainConfig(epochs=2, widths=(4, 4)))
    assert math.isnan(report.heldout_sup_error)
    assert math.isnan(report.heldout_mean_abs)


def test_train_empty_train_set():
    data = SimpleNamespace(
        train_x=np.zeros((0, 1)),
        train_y=np.zeros(0),
        heldout_x=np.zeros((0, 1)),
        heldout_y=np.zeros(0),
    )
    with pytest.raises(ArgumentError):
        train(init(1, (4, 4), seed=0), data, TrainConfig(epochs=1, widths=(4, 4)))


def test_train_divergence():
    # residuals of order 1e200 overflow the squared loss immediately
    data = tiny_dataset()
    data.train_y = np.full_like(data.train_y, 1e200)
    with np.errstate(all="ignore"), pytest.raises(DivergenceError):
        train(init(1, (4, 4), seed=0), data, TrainConfig(epochs=1, widths=(4, 4)))


def test_train_config_validation():
    with pytest.raises(ArgumentError):
        TrainConfig(epochs=-1)
    with pytest.raises(ArgumentError):
        TrainConfig(batch_size=0)
    with pytest.raises(ArgumentError):
        TrainConfig(lr_schedule="step")
    assert TrainConfig().lr_schedule == "cosine"


def test_network_json_roundtrip():
    net = init(3, (5, 4), seed=8)
    back = TanhNetwork.from_json(net.to_json())
    assert back.input_dim == net.input_dim
    for pa, pb in zip(net.parameters(), back.parameters()):
        assert np.array_equal(pa, pb)
    x = np.array([0.1, -0.2, 0.3])
    assert forward(back, x) == forward(net, x)


def test_report_and_config_json():
    cfg = TrainConfig(epochs=5, widths=(4, 4))
    obj = cfg.to_json()
    assert obj["epochs"] == 5 and obj["widths"] == [4, 4]
    report = TrainReport(
        epochs=1,
        final_train_mse=0.5,
        heldout_sup_error=0.1,
        heldout_mean_abs=0.05,
        param_count=10,
        seed=0,
        loss_curve=[0.5],
    )
    assert report.to_json()["loss_curve"] == [0.5]
