"""Dataset generation, error decomposition, rate studies, trend experiments.

Every study returns a small dataclass that serializes to a JSON report plus
CSV tables.  Table rows carry a (kernel, m, M, seed) provenance tuple and
all randomness flows from explicit seeds, so a rerun with the same config
reproduces the output files byte for byte.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .errors import ArgumentError, DivergenceError
from .functionals import TargetFunctional
from .geometry import PointSet, uniform_grid
from .kernels import GAUSSIAN, INVERSE_MULTIQUADRIC, SOBOLEV, Kernel, m_d_constant
from .nets import TrainConfig, TrainReport, forward_batch, init, theoretical_widths, train
from .rkhs import (
    RkhsFunction,
    build_gram,
    power_function_sup,
    project,
    sample_unit_ball,
)
from .spectral import SpectralReport, check_eigen_lower_bound, holder_constant_G

_NORM_TARGET_RANGE = (0.2, 1.0)
DEFAULT_SAMPLE_CENTERS = 10


def kernel_label(kernel: Kernel) -> str:
    """Compact deterministic one-token label for provenance columns."""
    if kernel.family == GAUSSIAN:
        return f"gaussian(sigma={kernel.sigma!r},d={kernel.dim})"
    if kernel.family == INVERSE_MULTIQUADRIC:
        return f"inverse_multiquadric(sigma={kernel.sigma!r},beta={kernel.beta!r},d={kernel.dim})"
    return f"sobolev(r={kernel.r!r},d={kernel.dim})"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Sampled (node values, functional value) rows with an 80/20 split.

    The first ``n_train`` rows are the training block; the remainder is
    held out.  The drawn functions ride along so projection-based error
    terms can be recomputed without resampling.
    """

    kernel: Kernel
    functional: TargetFunctional
    m: int
    seed: int
    grid: PointSet
    functions: list[RkhsFunction]
    inputs: np.ndarray
    targets: np.ndarray
    n_train: int

    @property
    def train_x(self) -> np.ndarray:
        return self.inputs[: self.n_train]

    @property
    def train_y(self) -> np.ndarray:
        return self.targets[: self.n_train]

    @property
    def heldout_x(self) -> np.ndarray:
        return self.inputs[self.n_train :]

    @property
    def heldout_y(self) -> np.ndarray:
        return self.targets[self.n_train :]

    def __len__(self) -> int:
        return self.inputs.shape[0]

    def to_csv(self) -> str:
        cols = [f"x{i}" for i in range(self.inputs.shape[1])]
        lines = [",".join(cols + ["y", "split"])]
        for i in range(len(self)):
            split = "train" if i < self.n_train else "heldout"
            row = [repr(float(v)) for v in self.inputs[i]] + [repr(float(self.targets[i])), split]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def generate_dataset(
    kernel: Kernel,
    functional: TargetFunctional,
    m: int,
    n_samples: int,
    seed: int,
    n_centers: int = DEFAULT_SAMPLE_CENTERS,
    holdout_fraction: float = 0.2,
) -> Dataset:
    """Draw unit-ball samples and tabulate their node values and targets.

    Norm targets are uniform on [0.2, 1] so the ball is covered without
    numerically degenerate near-zero draws; per-sample seeds come from one
    master generator, making the whole dataset a pure function of ``seed``.
    """
    if not (isinstance(n_samples, (int, np.integer)) and n_samples >= 1):
        raise ArgumentError(f"n_samples must be a positive integer, got {n_samples!r}")
    if not (0.0 <= holdout_fraction < 1.0):
        raise ArgumentError(f"holdout_fraction must lie in [0, 1), got {holdout_fraction!r}")
    grid = uniform_grid(int(m), kernel.dim)
    rng = np.random.default_rng(seed)
    functions: list[RkhsFunction] = []
    inputs = np.empty((int(n_samples), len(grid)))
    targets = np.empty(int(n_samples))
    for i in range(int(n_samples)):
        child = int(rng.integers(0, 2**63 - 1))
        target_norm = float(rng.uniform(*_NORM_TARGET_RANGE))
        f = sample_unit_ball(kernel, n_centers, target_norm, child)
        functions.append(f)
        inputs[i] = f.eval_at(grid.points)
        targets[i] = functional.value(f)
    n_heldout = int(round(holdout_fraction * int(n_samples)))
    n_train = int(n_samples) - n_heldout
    return Dataset(
        kernel=kernel,
        functional=functional,
        m=int(m),
        seed=int(seed),
        grid=grid,
        functions=functions,
        inputs=inputs,
        targets=targets,
        n_train=n_train,
    )


@dataclass(frozen=True)
class DecompositionResult:
    """Worst-case split of the total error into projection and network parts.

    term_I is the largest |F(f) - F(Pf)| over the samples, term_II the
    largest |F(Pf) - net(f at nodes)|, and total the largest end-to-end
    error; the triangle inequality total <= term_I + term_II is asserted at
    construction time by the producing routine.
    """

    term_I: float
    term_II: float
    total: float
    c_f: float
    power_sup: float
    train_report: TrainReport

    def to_json(self) -> dict:
        return {
            "term_I": self.term_I,
            "term_II": self.term_II,
            "total": self.total,
            "c_f": self.c_f,
            "power_sup": self.power_sup,
            "train_report": self.train_report.to_json(),
        }


def error_decomposition(
    kernel: Kernel,
    functional: TargetFunctional,
    m: int,
    n_samples: int,
    train_config: TrainConfig,
    dataset: Dataset | None = None,
) -> DecompositionResult:
    """Train a network on sampled targets and split its worst-case error.

    The projection route F(Pf) is computed per sample through the Gram
    system of the node grid; the network is trained fresh from the config.
    Passing a prebuilt ``dataset`` skips resampling (it must match kernel,
    functional and m).
    """
    if dataset is None:
        dataset = generate_dataset(kernel, functional, m, n_samples, train_config.seed)
    system = build_gram(kernel, dataset.grid)
    projected = np.empty(len(dataset))
    for i in range(len(dataset)):
        pf = project(system, dataset.inputs[i])
        projected[i] = functional.value(pf)
    net = init(len(system), train_config.widths, train_config.seed)
    report = train(net, dataset, train_config)
    preds = forward_batch(net, dataset.inputs)
    term_i = float(np.abs(dataset.targets - projected).max())
    term_ii = float(np.abs(projected - preds).max())
    total = float(np.abs(dataset.targets - preds).max())
    if not total <= term_i + term_ii + 1e-10:
        raise AssertionError(
            f"triangle inequality violated: {total} > {term_i} + {term_ii}"
        )
    return DecompositionResult(
        term_I=term_i,
        term_II=term_ii,
        total=total,
        c_f=functional.holder_constant(kernel),
        power_sup=power_function_sup(system),
        train_report=report,
    )


@dataclass(frozen=True)
class PowerRateStudy:
    """Power-function sups across grid sizes with the family's decay fit."""

    kernel: Kernel
    m_list: list[int]
    sups: list[float]
    fit_kind: str
    slope: float
    intercept: float
    r_squared: float
    stderr: float
    ratios: list[float]
    ratios_strictly_decreasing: bool
    eval_resolution: int | None

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel.to_json(),
            "m_list": list(self.m_list),
            "sups": list(self.sups),
            "fit_kind": self.fit_kind,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "stderr": self.stderr,
            "ratios": list(self.ratios),
            "ratios_strictly_decreasing": self.ratios_strictly_decreasing,
            "eval_resolution": self.eval_resolution,
        }

    def table(self) -> tuple[list[str], list[list]]:
        header = ["kernel", "m", "M", "seed", "sup_power"]
        label = kernel_label(self.kernel)
        rows = [[label, m, "", "", sup] for m, sup in zip(self.m_list, self.sups)]
        return header, rows


def _map_over(fn, items, threads: int):
    """Ordered map, optionally through a thread pool for independent items."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(fn, items))


def rate_study_power(
    kernel: Kernel, m_list, eval_resolution: int | None = None, threads: int = 1
) -> PowerRateStudy:
    """Fit the decay of the squared power-function sup across grid sizes.

    The interpolation-error bounds control the squared sup (it is the Schur
    complement that obeys the Hölder estimate), so the fit runs on
    log(sup^2); the table still reports the plain sup per m.  The abscissa
    depends on the family: log m for sobolev (polynomial decay), m for the
    inverse multiquadric (exponential decay), m log m for the gaussian
    (superexponential decay).  A nonnegative fitted slope means decay
    failed and raises.
    """
    m_list = [int(m) for m in m_list]
    if len(m_list) < 4 or any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ArgumentError("m_list must be strictly increasing with at least 4 entries")

    def _sup_for(m: int) -> float:
        system = build_gram(kernel, uniform_grid(m, kernel.dim))
        eval_set = (
            uniform_grid(int(eval_resolution), kernel.dim)
            if eval_resolution is not None
            else None
        )
        return power_function_sup(system, eval_set)

    sups = _map_over(_sup_for, m_list, threads)
    log_sup_sq = 2.0 * np.log(sups)
    if kernel.family == SOBOLEV:
        xs, fit_kind = np.log(m_list), "log_sup_sq_vs_log_m"
    elif kernel.family == INVERSE_MULTIQUADRIC:
        xs, fit_kind = np.asarray(m_list, dtype=float), "log_sup_sq_vs_m"
    else:
        marr = np.asarray(m_list, dtype=float)
        xs, fit_kind = marr * np.log(np.maximum(marr, 1.0 + 1e-12)), "log_sup_sq_vs_m_log_m"
    fit = linregress(xs, log_sup_sq)
    if not fit.slope < 0:
        raise DivergenceError(
            f"power-function sups failed to decay (fitted slope {fit.slope:.3g})"
        )
    ratios = [sups[i + 1] / sups[i] for i in range(len(sups) - 1)]
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    return PowerRateStudy(
        kernel=kernel,
        m_list=m_list,
        sups=[float(s) for s in sups],
        fit_kind=fit_kind,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        stderr=float(fit.stderr),
        ratios=[float(r) for r in ratios],
        ratios_strictly_decreasing=bool(decreasing),
        eval_resolution=None if eval_resolution is None else int(eval_resolution),
    )


@dataclass(frozen=True)
class EigenRateStudy:
    """Spectral lower-bound reports across grid sizes."""

    kernel: Kernel
    d: int
    reports: list[SpectralReport]

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel.to_json(),
            "d": self.d,
            "reports": [r.to_json() for r in self.reports],
        }

    def table(self) -> tuple[list[str], list[list]]:
        header = ["kernel", "m", "d", "lambda_min", "m_gamma", "m_pow_d_gamma", "satisfied"]
        label = kernel_label(self.kernel)
        rows = [
            [
                label,
                r.m,
                r.d,
                r.lambda_min,
                r.bound_m_gamma,
                r.bound_m_pow_d_gamma,
                r.bound_satisfied,
            ]
            for r in self.reports
        ]
        return header, rows


def rate_study_eigen(
    kernel: Kernel, m_list, d: int | None = None, threads: int = 1
) -> EigenRateStudy:
    """Smallest eigenvalue against the spectral bound for each grid size."""
    if d is None:
        d = kernel.dim
    reports = _map_over(
        lambda m: check_eigen_lower_bound(kernel, int(m), int(d)), list(m_list), threads
    )
    return EigenRateStudy(kernel=kernel, d=int(d), reports=reports)


@dataclass(frozen=True)
class FlmRunRow:
    """Result of one grid size inside the regression-map experiment."""

    m: int
    n_nodes: int
    term_I: float
    term_II: float
    total: float
    heldout_sup_error: float
    heldout_mean_abs: float
    power_sup: float
    c_f: float
    c_g: float
    jitter_used: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class FlmExperiment:
    """Regression-map training across grid sizes with trend flags."""

    kernel: Kernel
    weight: str
    link: str
    m_list: list[int]
    n_samples: int
    train_config: TrainConfig
    rows: list[FlmRunRow]
    sup_trend_nonincreasing: bool
    wall_time: float

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel.to_json(),
            "weight": self.weight,
            "link": self.link,
            "m_list": list(self.m_list),
            "n_samples": self.n_samples,
            "train_config": self.train_config.to_json(),
            "rows": [r.to_json() for r in self.rows],
            "sup_trend_nonincreasing": self.sup_trend_nonincreasing,
            "wall_time": self.wall_time,
        }

    def table(self) -> tuple[list[str], list[list]]:
        header = [
            "kernel",
            "m",
            "M",
            "seed",
            "term_I",
            "term_II",
            "total",
            "heldout_sup_error",
            "heldout_mean_abs",
            "power_sup",
            "c_f",
            "c_g",
        ]
        label = kernel_label(self.kernel)
        rows = [
            [
                label,
                r.m,
                "",
                self.train_config.seed,
                r.term_I,
                r.term_II,
                r.total,
                r.heldout_sup_error,
                r.heldout_mean_abs,
                r.power_sup,
                r.c_f,
                r.c_g,
            ]
            for r in self.rows
        ]
        return header, rows


TREND_BAND = 0.2


def flm_experiment(
    weight: str,
    link: str,
    kernel: Kernel,
    m_list,
    train_config: TrainConfig,
    n_samples: int = 4000,
) -> FlmExperiment:
    """Train the regression map at several grid sizes and track the trend.

    For each m a fresh dataset is drawn (same seed), a fresh network is
    trained with identical hyperparameters, and the error decomposition is
    recorded together with the regularity constants.  The trend flag is
    true when the held-out sup error never rises by more than the 20%
    noise band from one grid size to the next.
    """
    start = time.perf_counter()
    functional = TargetFunctional(kind="gflm", beta=weight, link=link)
    rows: list[FlmRunRow] = []
    for m in m_list:
        dataset = generate_dataset(kernel, functional, int(m), int(n_samples), train_config.seed)
        dec = error_decomposition(
            kernel, functional, int(m), int(n_samples), train_config, dataset=dataset
        )
        system = build_gram(kernel, dataset.grid)
        c_g = holder_constant_G(system, functional.holder_exponent(), dec.c_f)
        rows.append(
            FlmRunRow(
                m=int(m),
                n_nodes=len(system),
                term_I=dec.term_I,
                term_II=dec.term_II,
                total=dec.total,
                heldout_sup_error=dec.train_report.heldout_sup_error,
                heldout_mean_abs=dec.train_report.heldout_mean_abs,
                power_sup=dec.power_sup,
                c_f=dec.c_f,
                c_g=c_g,
                jitter_used=system.jitter_used,
            )
        )
    sups = [r.heldout_sup_error for r in rows]
    trend = all(b <= a * (1.0 + TREND_BAND) for a, b in zip(sups, sups[1:]))
    return FlmExperiment(
        kernel=kernel,
        weight=weight,
        link=link,
        m_list=[int(m) for m in m_list],
        n_samples=int(n_samples),
        train_config=train_config,
        rows=rows,
        sup_trend_nonincreasing=bool(trend),
        wall_time=time.perf_counter() - start,
    )


THEOREM_FAMILIES = ("sobolev", "multiquadric", "gaussian")


def theorem_metadata(theorem: str, M: int, params: dict | None = None) -> dict:
    """Grid size, width schedule, and error-bound shape for one theorem.

    ``params`` supplies the constants the statements leave free: r, s, d,
    sigma, beta and the decay constant c (never given numerically; estimate
    it from a rate study fit).  The error-bound factor is evaluated with
    its outer constant set to 1 and is informational only.
    """
    if theorem not in THEOREM_FAMILIES:
        raise ArgumentError(f"unknown theorem {theorem!r}; choose from {THEOREM_FAMILIES}")
    if not (isinstance(M, (int, np.integer)) and M >= 2):
        raise ArgumentError(f"M must be an integer >= 2, got {M!r}")
    p = {"r": 2.0, "s": 1.0, "d": 1, "sigma": 1.0, "beta": 1.0, "c": 1.0}
    p.update(params or {})
    r, s, d, sigma, beta, c = (
        float(p["r"]),
        float(p["s"]),
        int(p["d"]),
        float(p["sigma"]),
        float(p["beta"]),
        float(p["c"]),
    )
    if not (0.0 < s <= 1.0):
        raise ArgumentError(f"s must lie in (0, 1], got {s}")
    log_m = math.log(M)
    if theorem == "sobolev":
        m = math.ceil(M ** (1.0 / (2.0 * s * (2.0 * r - 1.0))))
        m_expr = "ceil(M^(1/(2 s (2r-1))))"
        exponent = (2.0 * r - d) / (2.0 * (2.0 * r - 1.0))
        factor = d ** (s * (r + 0.5)) * M ** (-exponent)
        bound_expr = "d^(s(r+1/2)) * M^(-(2r-d)/(2(2r-1)))"
    elif theorem == "multiquadric":
        md = m_d_constant(d)
        m = math.ceil(log_m / (4.0 * md * sigma * s + c * s / math.sqrt(d)))
        m_expr = "ceil(log(M) / (4 M_d sigma s + c s / sqrt(d)))"
        exponent = c / (4.0 * md * math.sqrt(d) * sigma + c)
        factor = log_m ** max(0.0, 2.0 * d - s * beta) * M ** (-exponent)
        bound_expr = "log(M)^max(0, 2d - s beta) * M^(-c/(4 M_d sqrt(d) sigma + c))"
    else:
        root = math.sqrt(c * c * s * s / d + 4.0 * sigma**2 * math.pi**2 * d * s * log_m)
        m = math.ceil(2.0 * log_m / (c * s / math.sqrt(d) + root))
        m_expr = "ceil(2 log(M) / (c s / sqrt(d) + sqrt(c^2 s^2 / d + 4 sigma^2 pi^2 d s log(M))))"
        inner = 0.5 * math.log(log_m) - math.log(c * s + sigma * math.pi * d * math.sqrt(s))
        exponent = inner / (2.0 * (1.0 + sigma * math.pi * d))
        factor = log_m**d * M ** (-exponent)
        bound_expr = (
            "log(M)^d * M^(-(1/(2(1+sigma pi d))) (log(log(M))/2 - log(c s + sigma pi d sqrt(s))))"
        )
    m = max(int(m), 1)
    n_inputs = (m + 1) ** d
    schedule = theoretical_widths(n_inputs, int(M))
    return {
        "theorem": theorem,
        "M": int(M),
        "params": {"r": r, "s": s, "d": d, "sigma": sigma, "beta": beta, "c": c},
        "m": m,
        "m_expression": m_expr,
        "N": n_inputs,
        "widths": [schedule.w1, schedule.w2],
        "param_count_bound": schedule.param_count_bound,
        "param_count_bound_float": float(schedule.param_count_bound)
        if schedule.param_count_bound < 1e308
        else float("inf"),
        "error_bound_factor": factor,
        "error_bound_expression": bound_expr,
    }
