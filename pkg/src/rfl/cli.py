"""Command line front end for the studies.

Subcommands: rates, eigen, project, train, flm, meta.  Each accepts an
optional JSON config file (``--config``) validated against a strict
schema that rejects unknown keys; individual flags override file values.
Outputs land under ``--out``, or ``$RFL_OUT_DIR/<command>``, or
``./rfl_out/<command>``: a ``report.json`` echoing the merged config,
``tables/*.csv``, and ``plots/*.svg`` when ``--plots`` is given.  CSV
files are byte-identical across reruns of the same config and seed.

Exit codes: 0 on success, 2 on configuration or argument errors, 3 on
numerical failures (singular Gram matrix, divergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from ._svg import line_plot_svg
from .errors import (
    ArgumentError,
    ConfigError,
    DivergenceError,
    ResourceLimitError,
    SingularGramError,
    UnsupportedConfigurationError,
)
from .experiments import (
    THEOREM_FAMILIES,
    flm_experiment,
    generate_dataset,
    kernel_label,
    rate_study_eigen,
    rate_study_power,
    theorem_metadata,
)
from .functionals import FUNCTIONAL_KINDS, LINKS, ODE_RHS, BETAS, TargetFunctional
from .geometry import uniform_grid
from .kernels import FAMILIES, Kernel
from .nets import TrainConfig, init, train
from .rkhs import (
    build_gram,
    default_power_eval_set,
    power_function_sup,
    project,
    rkhs_norm,
    sample_unit_ball,
    sup_error,
)

_INT = {"type": "integer"}
_POS_INT = {"type": "integer", "minimum": 1}
_POS_NUM = {"type": "number", "exclusiveMinimum": 0}
_M_LIST = {"type": "array", "items": _POS_INT, "minItems": 1}

_KERNEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "family": {"enum": sorted(FAMILIES)},
        "sigma": _POS_NUM,
        "beta": _POS_NUM,
        "r": {"type": "number"},
        "dim": _POS_INT,
    },
    "required": ["family"],
}

_FUNCTIONAL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": sorted(FUNCTIONAL_KINDS)},
        "beta": {"type": "string", "enum": sorted(BETAS)},
        "link": {"enum": sorted(LINKS)},
        "ode": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rhs": {"enum": sorted(ODE_RHS)},
                "a": {"type": "number"},
                "b": {"type": "number"},
                "h0": {"type": "number"},
                "steps": {"type": "integer", "minimum": 16},
            },
            "required": ["rhs", "a", "b", "h0", "steps"],
        },
        "quadrature_points": {"type": "integer", "minimum": 33},
    },
    "required": ["kind"],
}

_COMMON_PROPS = {
    "seed": _INT,
    "output_dir": {"type": "string"},
    "threads": _POS_INT,
    "plots": {"type": "boolean"},
}

_TRAIN_PROPS = {
    "widths": {"type": "array", "items": _POS_INT, "minItems": 2, "maxItems": 2},
    "epochs": _POS_INT,
    "batch_size": _POS_INT,
    "learning_rate": _POS_NUM,
    "lr_schedule": {"enum": ["constant", "cosine"]},
}


def _schema(props: dict) -> dict:
    merged = dict(_COMMON_PROPS)
    merged.update(props)
    return {"type": "object", "additionalProperties": False, "properties": merged}


_COMMAND_SCHEMAS = {
    "rates": _schema(
        {
            "kernel": _KERNEL_SCHEMA,
            "m_list": {**_M_LIST, "minItems": 4},
            "eval_resolution": _POS_INT,
        }
    ),
    "eigen": _schema({"kernel": _KERNEL_SCHEMA, "m_list": _M_LIST, "d": _POS_INT}),
    "project": _schema(
        {
            "kernel": _KERNEL_SCHEMA,
            "m": _POS_INT,
            "n_samples": _POS_INT,
            "n_centers": _POS_INT,
            "eval_resolution": _POS_INT,
        }
    ),
    "train": _schema(
        {
            "kernel": _KERNEL_SCHEMA,
            "functional": _FUNCTIONAL_SCHEMA,
            "weight": {"enum": sorted(BETAS)},
            "link": {"enum": sorted(LINKS)},
            "m": _POS_INT,
            "n_samples": _POS_INT,
            **_TRAIN_PROPS,
        }
    ),
    "flm": _schema(
        {
            "kernel": _KERNEL_SCHEMA,
            "weight": {"enum": sorted(BETAS)},
            "link": {"enum": sorted(LINKS)},
            "m_list": _M_LIST,
            "n_samples": _POS_INT,
            **_TRAIN_PROPS,
        }
    ),
    "meta": _schema(
        {
            "theorem": {"enum": sorted(THEOREM_FAMILIES)},
            "M": {"type": "integer", "minimum": 2},
            "params": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "r": {"type": "number"},
                    "s": _POS_NUM,
                    "d": _POS_INT,
                    "sigma": _POS_NUM,
                    "beta": _POS_NUM,
                    "c": _POS_NUM,
                },
            },
        }
    ),
}

_KERNEL_FLAGS = ("sigma", "beta", "r")
_SCALAR_FLAGS = {
    "out": "output_dir",
    "m": "m",
    "M": "M",
    "seed": "seed",
    "threads": "threads",
    "n_samples": "n_samples",
    "n_centers": "n_centers",
    "eval_resolution": "eval_resolution",
    "epochs": "epochs",
    "batch_size": "batch_size",
    "lr": "learning_rate",
    "lr_schedule": "lr_schedule",
    "weight": "weight",
    "link": "link",
    "theorem": "theorem",
}
_META_PARAM_FLAGS = ("r", "s", "d", "sigma", "beta", "c")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigError(f"{flag} expects comma separated integers, got {text!r}") from None


def _merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    if args.command == "meta":
        params = dict(cfg.get("params") or {})
        for name in _META_PARAM_FLAGS:
            val = getattr(args, name, None)
            if val is not None:
                params[name] = val
        if params:
            cfg["params"] = params
    else:
        kcfg = dict(cfg.get("kernel") or {})
        if getattr(args, "kernel", None) is not None:
            kcfg["family"] = args.kernel
        for name in _KERNEL_FLAGS:
            val = getattr(args, name, None)
            if val is not None:
                kcfg[name] = val
        if getattr(args, "d", None) is not None:
            kcfg["dim"] = args.d
        if kcfg:
            cfg["kernel"] = kcfg
        if args.command == "eigen" and getattr(args, "d", None) is not None:
            cfg["d"] = args.d
    for flag, key in _SCALAR_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "m_list", None) is not None:
        cfg["m_list"] = _parse_int_list(args.m_list, "--m-list")
    if getattr(args, "widths", None) is not None:
        widths = _parse_int_list(args.widths, "--widths")
        if len(widths) != 2:
            raise ConfigError(f"--widths expects two integers, got {args.widths!r}")
        cfg["widths"] = widths
    if getattr(args, "plots", False):
        cfg["plots"] = True
    if getattr(args, "functional", None) is not None:
        try:
            cfg["functional"] = json.loads(args.functional)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--functional is not valid JSON: {exc}") from None
    return cfg


def _validate(cfg: dict, command: str) -> None:
    try:
        jsonschema.validate(cfg, _COMMAND_SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "config"
        raise ConfigError(f"invalid {command} config at {where}: {exc.message}") from None


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing required config key {key!r} (flag --{key.replace('_', '-')})")
    return cfg[key]


def _kernel_from(cfg: dict) -> Kernel:
    if "kernel" not in cfg:
        raise ConfigError("a kernel is required (flag --kernel, or a 'kernel' config object)")
    return Kernel.from_json(cfg["kernel"])


def _train_config(cfg: dict) -> TrainConfig:
    kwargs = {}
    for key in ("epochs", "batch_size", "learning_rate", "seed", "lr_schedule"):
        if key in cfg:
            kwargs[key] = cfg[key]
    if "widths" in cfg:
        kwargs["widths"] = tuple(int(w) for w in cfg["widths"])
    return TrainConfig(**kwargs)


def _functional_from(cfg: dict) -> TargetFunctional:
    if "functional" in cfg:
        return TargetFunctional.from_json(cfg["functional"])
    return TargetFunctional(
        kind="gflm", beta=cfg.get("weight", "sin2pi"), link=cfg.get("link", "tanh")
    )


def _resolve_out(cfg: dict, command: str) -> Path:
    if cfg.get("output_dir"):
        return Path(cfg["output_dir"])
    root = os.environ.get("RFL_OUT_DIR")
    base = Path(root) if root else Path("rfl_out")
    return base / command


def _csv_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_outputs(outdir: Path, payload: dict, tables: dict, plots: dict | None = None) -> None:
    """Write report.json, tables/*.csv and plots/*.svg under one directory."""
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if tables:
        tdir = outdir / "tables"
        tdir.mkdir(exist_ok=True)
        for name, (header, rows) in tables.items():
            lines = [",".join(header)]
            lines.extend(",".join(_csv_cell(c) for c in row) for row in rows)
            (tdir / f"{name}.csv").write_text("\n".join(lines) + "\n")
    if plots:
        pdir = outdir / "plots"
        pdir.mkdir(exist_ok=True)
        for name, svg in plots.items():
            (pdir / f"{name}.svg").write_text(svg)


def _cmd_rates(cfg: dict):
    kernel = _kernel_from(cfg)
    m_list = _require(cfg, "m_list")
    study = rate_study_power(
        kernel, m_list, cfg.get("eval_resolution"), threads=int(cfg.get("threads", 1))
    )
    payload = {"command": "rates", "config": cfg, "study": study.to_json()}
    tables = {"rates": study.table()}
    plots = {}
    if cfg.get("plots"):
        series = [(kernel_label(kernel), [float(m) for m in study.m_list], study.sups)]
        plots["rates"] = line_plot_svg(
            series, "power function sup vs grid size", "m", "sup", logy=True
        )
    return payload, tables, plots


def _cmd_eigen(cfg: dict):
    kernel = _kernel_from(cfg)
    m_list = _require(cfg, "m_list")
    study = rate_study_eigen(kernel, m_list, cfg.get("d"), threads=int(cfg.get("threads", 1)))
    payload = {"command": "eigen", "config": cfg, "study": study.to_json()}
    tables = {"eigen": study.table()}
    plots = {}
    if cfg.get("plots"):
        ms = [float(r.m) for r in study.reports]
        series = [
            ("lambda_min", ms, [r.lambda_min for r in study.reports]),
            ("m_gamma", ms, [r.bound_m_gamma for r in study.reports]),
        ]
        plots["eigen"] = line_plot_svg(
            series, "smallest eigenvalue vs lower bound", "m", "value", logy=True
        )
    return payload, tables, plots


def _cmd_project(cfg: dict):
    kernel = _kernel_from(cfg)
    m = int(_require(cfg, "m"))
    n_samples = int(cfg.get("n_samples", 100))
    n_centers = int(cfg.get("n_centers", 10))
    seed = int(cfg.get("seed", 0))
    grid = uniform_grid(m, kernel.dim)
    system = build_gram(kernel, grid)
    if cfg.get("eval_resolution") is not None:
        eval_set = uniform_grid(int(cfg["eval_resolution"]), kernel.dim)
    else:
        eval_set = default_power_eval_set(grid)
    psup = power_function_sup(system, eval_set)
    rng = np.random.default_rng(seed)
    label = kernel_label(kernel)
    rows = []
    max_ratio = 0.0
    for i in range(n_samples):
        child = int(rng.integers(0, 2**63 - 1))
        target = float(rng.uniform(0.2, 1.0))
        f = sample_unit_ball(kernel, n_centers, target, child)
        pf = project(system, f.eval_at(grid.points))
        err = sup_error(f, pf, eval_set)
        norm = rkhs_norm(f)
        bound = norm * psup
        ratio = err / bound if bound > 0 else 0.0
        max_ratio = max(max_ratio, ratio)
        rows.append([label, m, "", seed, i, norm, err, bound, ratio])
    payload = {
        "command": "project",
        "config": cfg,
        "power_sup": psup,
        "max_ratio": max_ratio,
        "n_samples": n_samples,
    }
    header = ["kernel", "m", "M", "seed", "sample", "norm", "sup_error", "bound", "ratio"]
    tables = {"project": (header, rows)}
    plots = {}
    if cfg.get("plots"):
        xs = [float(r[4]) for r in rows]
        series = [("sup_error", xs, [r[6] for r in rows]), ("bound", xs, [r[7] for r in rows])]
        plots["project"] = line_plot_svg(
            series, "projection error vs certified bound", "sample", "value", logy=True
        )
    return payload, tables, plots


def _cmd_train(cfg: dict):
    kernel = _kernel_from(cfg)
    functional = _functional_from(cfg)
    m = int(_require(cfg, "m"))
    n_samples = int(cfg.get("n_samples", 1000))
    config = _train_config(cfg)
    dataset = generate_dataset(kernel, functional, m, n_samples, config.seed)
    net = init(len(dataset.grid), config.widths, config.seed)
    report = train(net, dataset, config)
    payload = {
        "command": "train",
        "config": cfg,
        "functional": functional.to_json(),
        "train_report": report.to_json(),
    }
    label = kernel_label(kernel)
    header = ["kernel", "m", "M", "seed", "epoch", "train_mse"]
    rows = [
        [label, m, "", config.seed, epoch, mse] for epoch, mse in enumerate(report.loss_curve)
    ]
    tables = {"loss_curve": (header, rows)}
    plots = {}
    if cfg.get("plots"):
        xs = [float(e) for e in range(len(report.loss_curve))]
        plots["loss_curve"] = line_plot_svg(
            [("train_mse", xs, list(report.loss_curve))],
            "training loss",
            "epoch",
            "mse",
            logy=True,
        )
    return payload, tables, plots


def _cmd_flm(cfg: dict):
    kernel = _kernel_from(cfg)
    m_list = _require(cfg, "m_list")
    config = _train_config(cfg)
    experiment = flm_experiment(
        cfg.get("weight", "sin2pi"),
        cfg.get("link", "tanh"),
        kernel,
        m_list,
        config,
        int(cfg.get("n_samples", 4000)),
    )
    payload = {"command": "flm", "config": cfg, "experiment": experiment.to_json()}
    tables = {"flm": experiment.table()}
    plots = {}
    if cfg.get("plots"):
        ms = [float(r.m) for r in experiment.rows]
        series = [
            ("heldout_sup", ms, [r.heldout_sup_error for r in experiment.rows]),
            ("term_I", ms, [r.term_I for r in experiment.rows]),
            ("term_II", ms, [r.term_II for r in experiment.rows]),
        ]
        plots["flm"] = line_plot_svg(
            series, "regression map error vs grid size", "m", "error", logy=True
        )
    return payload, tables, plots


def _cmd_meta(cfg: dict):
    theorem = _require(cfg, "theorem")
    big_m = _require(cfg, "M")
    meta = theorem_metadata(theorem, int(big_m), cfg.get("params"))
    meta = dict(meta)
    # the exact bound can exceed the float range; echo it as a string
    meta["param_count_bound"] = str(meta["param_count_bound"])
    payload = {"command": "meta", "config": cfg, "metadata": meta}
    return payload, {}, {}


_HANDLERS = {
    "rates": _cmd_rates,
    "eigen": _cmd_eigen,
    "project": _cmd_project,
    "train": _cmd_train,
    "flm": _cmd_flm,
    "meta": _cmd_meta,
}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file; flags override its values")
    sp.add_argument("--out", help="output directory (default $RFL_OUT_DIR/<command>)")
    sp.add_argument("--seed", type=int, help="master seed")
    sp.add_argument(
        "--threads",
        type=int,
        help="worker threads for per-grid-size studies (default 1 for reproducibility)",
    )
    sp.add_argument("--plots", action="store_true", help="also write SVG plots")


def _add_kernel(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--kernel", choices=sorted(FAMILIES), help="kernel family")
    sp.add_argument("--sigma", type=float, help="kernel length-scale")
    sp.add_argument("--beta", type=float, help="inverse multiquadric exponent")
    sp.add_argument("--r", type=float, help="sobolev smoothness order")
    sp.add_argument("--d", type=int, help="input dimension")


def _add_train_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--widths", help="two comma separated hidden widths, e.g. 64,64")
    sp.add_argument("--epochs", type=int)
    sp.add_argument("--batch-size", dest="batch_size", type=int)
    sp.add_argument("--lr", type=float, help="peak learning rate")
    sp.add_argument("--lr-schedule", dest="lr_schedule", choices=["constant", "cosine"])
    sp.add_argument("--n-samples", dest="n_samples", type=int)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfl",
        description="Studies of kernel interpolation and network training on node values.",
    )
    sub = parser.add_subparsers(dest="command")

    rates = sub.add_parser("rates", help="power-function decay across grid sizes")
    _add_common(rates)
    _add_kernel(rates)
    rates.add_argument("--m-list", dest="m_list", help="comma separated grid sizes")
    rates.add_argument("--eval-resolution", dest="eval_resolution", type=int)

    eigen = sub.add_parser("eigen", help="smallest eigenvalue vs spectral lower bound")
    _add_common(eigen)
    _add_kernel(eigen)
    eigen.add_argument("--m-list", dest="m_list", help="comma separated grid sizes")

    proj = sub.add_parser("project", help="projection error vs certified bound")
    _add_common(proj)
    _add_kernel(proj)
    proj.add_argument("--m", type=int, help="grid size")
    proj.add_argument("--n-samples", dest="n_samples", type=int)
    proj.add_argument("--n-centers", dest="n_centers", type=int)
    proj.add_argument("--eval-resolution", dest="eval_resolution", type=int)

    tr = sub.add_parser("train", help="train one network on sampled functional values")
    _add_common(tr)
    _add_kernel(tr)
    tr.add_argument("--m", type=int, help="grid size")
    tr.add_argument("--functional", help="functional config as inline JSON")
    tr.add_argument("--weight", choices=sorted(BETAS), help="integral weight name")
    tr.add_argument("--link", choices=sorted(LINKS), help="link function name")
    _add_train_flags(tr)

    flm = sub.add_parser("flm", help="regression-map study across grid sizes")
    _add_common(flm)
    _add_kernel(flm)
    flm.add_argument("--m-list", dest="m_list", help="comma separated grid sizes")
    flm.add_argument("--weight", choices=sorted(BETAS), help="integral weight name")
    flm.add_argument("--link", choices=sorted(LINKS), help="link function name")
    _add_train_flags(flm)

    meta = sub.add_parser("meta", help="width schedule and bound shape for one theorem")
    _add_common(meta)
    meta.add_argument("--theorem", choices=sorted(THEOREM_FAMILIES))
    meta.add_argument("--M", type=int, help="target width parameter")
    meta.add_argument("--r", type=float)
    meta.add_argument("--s", type=float)
    meta.add_argument("--d", type=int)
    meta.add_argument("--sigma", type=float)
    meta.add_argument("--beta", type=float)
    meta.add_argument("--c", type=float)

    return parser


def run(argv=None) -> int:
    """Parse arguments, run one subcommand, and return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _merge_config(args)
        _validate(cfg, args.command)
        payload, tables, plots = _HANDLERS[args.command](cfg)
        outdir = _resolve_out(cfg, args.command)
        write_outputs(outdir, payload, tables, plots)
        print(outdir)
        return 0
    except (ConfigError, ArgumentError, UnsupportedConfigurationError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SingularGramError, DivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
