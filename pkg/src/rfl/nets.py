"""Two-hidden-layer tanh networks: forward pass, backprop, training loop.

The network computes a^T tanh(W2 tanh(W1 x - b1) - b2); biases are
subtracted after the affine map, matching the convention of the width
schedule in :func:`theoretical_widths`.  Everything is plain numpy and
deterministic per seed; training is single threaded.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, DivergenceError

DEFAULT_WIDTHS = (64, 64)


class WidthSchedule(NamedTuple):
    w1: int
    w2: int
    param_count_bound: int


def theoretical_widths(N: int, M: int) -> WidthSchedule:
    """Hidden widths sufficient for the constructive approximation result.

    For input dimension N >= 2 the widths are N(M-1) and
    3 ceil((N+1)/2) (5M)^N; one-dimensional inputs get (M-1, 6M).  The
    parameter bound counts weights and biases of the two hidden layers plus
    the outer weights exactly.  The second width is astronomical for even
    modest N, which is the point: it is metadata, not a training
    configuration.  A warning is issued when M <= 5 N^2, where the
    schedule's hypothesis fails.
    """
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise ArgumentError(f"input dimension N must be a positive integer, got {N!r}")
    if not (isinstance(M, (int, np.integer)) and M >= 2):
        raise ArgumentError(f"M must be an integer >= 2, got {M!r}")
    if M <= 5 * N * N:
        warnings.warn(
            f"width schedule assumes M > 5 N^2 (here M={M}, 5N^2={5 * N * N}); "
            "the returned widths are outside the schedule's hypothesis",
            stacklevel=2,
        )
    if N == 1:
        w1, w2 = M - 1, 6 * M
    else:
        w1 = N * (M - 1)
        w2 = 3 * ((N + 1 + 1) // 2) * (5 * M) ** N
    params = w1 * (N + 1) + w2 * (w1 + 1) + w2
    return WidthSchedule(int(w1), int(w2), int(params))


@dataclass
class TanhNetwork:
    """Parameter container for the two-hidden-layer tanh architecture."""

    input_dim: int
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    a: np.ndarray

    @property
    def widths(self) -> tuple[int, int]:
        return (self.W1.shape[0], self.W2.shape[0])

    @property
    def param_count(self) -> int:
        return self.W1.size + self.b1.size + self.W2.size + self.b2.size + self.a.size

    def parameters(self) -> list[np.ndarray]:
        return [self.W1, self.b1, self.W2, self.b2, self.a]

    def to_json(self) -> dict:
        return {
            "input_dim": int(self.input_dim),
            "widths": [int(w) for w in self.widths],
            "W1": self.W1.ravel().tolist(),
            "b1": self.b1.tolist(),
            "W2": self.W2.ravel().tolist(),
            "b2": self.b2.tolist(),
            "a": self.a.tolist(),
        }

    @staticmethod
    def from_json(obj: dict) -> "TanhNetwork":
        n = int(obj["input_dim"])
        w1, w2 = (int(w) for w in obj["widths"])
        return TanhNetwork(
            input_dim=n,
            W1=np.asarray(obj["W1"], dtype=float).reshape(w1, n),
            b1=np.asarray(obj["b1"], dtype=float),
            W2=np.asarray(obj["W2"], dtype=float).reshape(w2, w1),
            b2=np.asarray(obj["b2"], dtype=float),
            a=np.asarray(obj["a"], dtype=float),
        )


def init(input_dim: int, widths: tuple[int, int], seed: int) -> TanhNetwork:
    """Glorot-uniform weights, zero biases, deterministic per seed."""
    if not (isinstance(input_dim, (int, np.integer)) and input_dim >= 1):
        raise ArgumentError(f"input_dim must be a positive integer, got {input_dim!r}")
    w1, w2 = int(widths[0]), int(widths[1])
    if w1 < 1 or w2 < 1:
        raise ArgumentError(f"widths must be >= 1, got {widths!r}")
    rng = np.random.default_rng(seed)

    def glorot(fan_out, fan_in):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_out, fan_in))

    return TanhNetwork(
        input_dim=int(input_dim),
        W1=glorot(w1, int(input_dim)),
        b1=np.zeros(w1),
        W2=glorot(w2, w1),
        b2=np.zeros(w2),
        a=glorot(1, w2)[0],
    )


def forward_batch(net: TanhNetwork, X: np.ndarray) -> np.ndarray:
    """Network outputs for an (n, input_dim) batch."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != net.input_dim:
        raise ArgumentError(
            f"expected inputs with {net.input_dim} features, got {X.shape[1]}"
        )
    H1 = np.tanh(X @ net.W1.T - net.b1)
    H2 = np.tanh(H1 @ net.W2.T - net.b2)
    return H2 @ net.a


def forward(net: TanhNetwork, x) -> float:
    """Scalar output for one input vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (net.input_dim,):
        raise ArgumentError(f"expected an input of length {net.input_dim}, got {x.shape}")
    return float(forward_batch(net, x[None, :])[0])


def gradient(net: TanhNetwork, X, y) -> list[np.ndarray]:
    """Exact gradients of the half-mean-squared-error loss on a batch.

    The loss is 0.5 * mean((forward(x) - y)^2); returns gradients in the
    order of :meth:`TanhNetwork.parameters`.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if X.shape[0] == 0:
        raise ArgumentError("gradient needs a nonempty batch")
    if X.shape[0] != y.shape[0]:
        raise ArgumentError("batch inputs and targets disagree in length")
    n = X.shape[0]
    H1 = np.tanh(X @ net.W1.T - net.b1)
    H2 = np.tanh(H1 @ net.W2.T - net.b2)
    out = H2 @ net.a
    e = (out - y) / n
    ga = H2.T @ e
    d2 = (e[:, None] * net.a[None, :]) * (1.0 - H2 * H2)
    gb2 = -d2.sum(axis=0)
    gW2 = d2.T @ H1
    d1 = (d2 @ net.W2) * (1.0 - H1 * H1)
    gb1 = -d1.sum(axis=0)
    gW1 = d1.T @ X
    return [gW1, gb1, gW2, gb2, ga]


def loss_mse(net: TanhNetwork, X, y) -> float:
    """Plain mean squared error of the network on a batch."""
    resid = forward_batch(net, X) - np.asarray(y, dtype=float)
    return float(np.mean(resid * resid))


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; defaults follow the package conventions.

    ``lr_schedule`` is either "constant" or "cosine" (decay to zero across
    the epoch budget); cosine is the default because it settles the final
    iterate instead of leaving it bouncing at the noise floor of the
    constant-rate optimizer.
    """

    epochs: int = 400
    batch_size: int = 64
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    widths: tuple[int, int] = DEFAULT_WIDTHS
    lr_schedule: str = "cosine"

    def __post_init__(self):
        if self.epochs < 0:
            raise ArgumentError(f"epochs must be >= 0, got {self.epochs!r}")
        if self.batch_size < 1:
            raise ArgumentError(f"batch_size must be >= 1, got {self.batch_size!r}")
        if self.lr_schedule not in ("constant", "cosine"):
            raise ArgumentError(
                f"lr_schedule must be 'constant' or 'cosine', got {self.lr_schedule!r}"
            )

    def to_json(self) -> dict:
        return {
            "epochs": int(self.epochs),
            "batch_size": int(self.batch_size),
            "learning_rate": float(self.learning_rate),
            "beta1": float(self.beta1),
            "beta2": float(self.beta2),
            "adam_eps": float(self.adam_eps),
            "seed": int(self.seed),
            "widths": [int(w) for w in self.widths],
            "lr_schedule": self.lr_schedule,
        }


@dataclass(frozen=True)
class TrainReport:
    """Outcome summary of one training run."""

    epochs: int
    final_train_mse: float
    heldout_sup_error: float
    heldout_mean_abs: float
    param_count: int
    seed: int
    loss_curve: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "epochs": int(self.epochs),
            "final_train_mse": self.final_train_mse,
            "heldout_sup_error": self.heldout_sup_error,
            "heldout_mean_abs": self.heldout_mean_abs,
            "param_count": int(self.param_count),
            "seed": int(self.seed),
            "loss_curve": list(self.loss_curve),
        }


def train(net: TanhNetwork, dataset, config: TrainConfig) -> TrainReport:
    """Adaptive-moment gradient descent on half-MSE with bias correction.

    ``dataset`` must expose train_x, train_y, heldout_x, heldout_y arrays.
    The loss curve records the plain train MSE once per epoch.  A
    non-finite loss aborts with a divergence error carrying the epoch it
    happened in.
    """
    X = np.asarray(dataset.train_x, dtype=float)
    y = np.asarray(dataset.train_y, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ArgumentError("training set is empty")
    rng = np.random.default_rng(config.seed)
    params = net.parameters()
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    step = 0
    loss_curve: list[float] = []
    for epoch in range(config.epochs):
        if config.lr_schedule == "cosine":
            lr = config.learning_rate * 0.5 * (1.0 + math.cos(math.pi * epoch / config.epochs))
        else:
            lr = config.learning_rate
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            grads = gradient(net, X[idx], y[idx])
            step += 1
            c1 = 1.0 - config.beta1**step
            c2 = 1.0 - config.beta2**step
            for p, g, ms, vs in zip(params, grads, m_state, v_state):
                ms *= config.beta1
                ms += (1.0 - config.beta1) * g
                vs *= config.beta2
                vs += (1.0 - config.beta2) * (g * g)
                p -= lr * (ms / c1) / (np.sqrt(vs / c2) + config.adam_eps)
        epoch_mse = loss_mse(net, X, y)
        if not math.isfinite(epoch_mse):
            raise DivergenceError(
                f"training loss became non-finite in epoch {epoch + 1} "
                f"(lr={lr:.3e}, widths={net.widths})"
            )
        loss_curve.append(epoch_mse)
    final_mse = loss_mse(net, X, y)
    hx = np.asarray(dataset.heldout_x, dtype=float)
    hy = np.asarray(dataset.heldout_y, dtype=float)
    if hx.shape[0] > 0:
        resid = np.abs(forward_batch(net, hx) - hy)
        sup_err = float(resid.max())
        mean_abs = float(resid.mean())
    else:
        sup_err = float("nan")
        mean_abs = float("nan")
    return TrainReport(
        epochs=int(config.epochs),
        final_train_mse=final_mse,
        heldout_sup_error=sup_err,
        heldout_mean_abs=mean_abs,
        param_count=net.param_count,
        seed=int(config.seed),
        loss_curve=loss_curve,
    )
