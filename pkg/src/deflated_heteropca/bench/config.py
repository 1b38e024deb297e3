"""Experiment specifications and their INI-style config files.

A config file holds one experiment::

    [experiment]
    model = matrix            ; matrix | factor | poisson | tensor
    methods = deflated, hetero, diag-del, svd
    trials = 20
    seed = 7

    [model]                   ; fixed model parameters, see MODEL_PARAMS
    n1 = 100
    n2 = 1000
    r = 3
    omega = 1

    [sweep]
    name = kappa              ; any key of MODEL_PARAMS[model]
    values = 1, 5, 20, 50

    [estimators]              ; optional
    t_max = 100
    iters = 10
    gap_const = 4

Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..errors import ConfigError
from ..estimators import DEFAULT_GAP_CONST, DEFAULT_HETERO_ITERS, DEFAULT_ROUND_ITERS, METHODS

MODELS = ("matrix", "factor", "poisson", "tensor")

# name -> (type, default); None defaults are derived from other params at run time
MODEL_PARAMS: dict[str, dict[str, tuple[type, Any]]] = {
    "matrix": {
        "n1": (int, 100),
        "n2": (int, 1000),
        "r": (int, 3),
        "kappa": (float, 5.0),
        "omega": (float, 1.0),
        "sigma_min": (float, None),
        "profile": (str, "spike"),
    },
    "factor": {
        "d": (int, 100),
        "n": (int, 1000),
        "r": (int, 3),
        "kappa": (float, 100.0),
        "omega": (float, 1.0),
        "lambda_min": (float, None),
        "lambda_factor": (float, 1.0),
    },
    "poisson": {
        "n1": (int, 100),
        "n2": (int, 1000),
        "r": (int, 3),
        "lambda": (float, 10.0),
    },
    "tensor": {
        "n": (int, 50),
        "r": (int, 3),
        "kappa": (float, 6.0),
        "omega": (float, 1.0),
    },
}

ESTIMATOR_KEYS = {
    "t_max": int,
    "iters": "intlist",
    "gap_const": float,
    "hooi_iters": int,
    "tensor_stage": str,
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A Monte-Carlo sweep over one model parameter."""

    model: str
    sweep_name: str
    grid: tuple[float, ...]
    methods: tuple[str, ...]
    trials: int = 1
    base_seed: int = 0
    params: Mapping[str, Any] = field(default_factory=dict)
    t_max: int = DEFAULT_HETERO_ITERS
    iters: tuple[int, ...] = (DEFAULT_ROUND_ITERS,)
    gap_const: float = DEFAULT_GAP_CONST
    hooi_iters: int = 50
    tensor_stage: str = "final"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        schema = MODEL_PARAMS[self.model]
        unknown = set(self.params) - set(schema)
        if unknown:
            raise ConfigError(f"unknown {self.model} parameter(s): {sorted(unknown)}")
        if self.sweep_name not in schema:
            raise ConfigError(f"cannot sweep {self.sweep_name!r} for model {self.model}")
        if not self.grid:
            raise ConfigError("sweep grid must be non-empty")
        if not self.methods:
            raise ConfigError("at least one method is required")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method(s) {bad}; expected a subset of {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must be distinct")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.tensor_stage not in ("final", "initial"):
            raise ConfigError("tensor_stage must be 'final' or 'initial'")
        for value in self.grid:
            self.resolved_params(value)

    def resolved_params(self, grid_value: float) -> dict[str, Any]:
        """Model parameters with defaults filled in and the swept one set."""
        schema = MODEL_PARAMS[self.model]
        out = {k: default for k, (_, default) in schema.items()}
        out.update(self.params)
        out[self.sweep_name] = grid_value
        for k, (typ, _) in schema.items():
            if out[k] is not None:
                out[k] = _coerce(typ, out[k], k)
        return out


def _coerce(typ, value, key):
    try:
        if typ is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return typ(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {value!r} as {typ.__name__}") from None


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def load_experiment(path: str | Path) -> ExperimentSpec:
    """Parse an experiment config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_experiment({s: dict(parser[s]) for s in parser.sections()})


def parse_experiment(sections: Mapping[str, Mapping[str, str]]) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from ``{section: {key: text}}``."""
    allowed = {"experiment", "model", "sweep", "estimators"}
    extra = set(sections) - allowed
    if extra:
        raise ConfigError(f"unknown section(s): {sorted(extra)}")
    for required in ("experiment", "sweep"):
        if required not in sections:
            raise ConfigError(f"missing [{required}] section")

    exp = dict(sections["experiment"])
    _reject_unknown("experiment", exp, {"model", "methods", "trials", "seed"})
    if "model" not in exp:
        raise ConfigError("[experiment] needs a model")
    model = exp["model"].strip()

    sweep = dict(sections["sweep"])
    _reject_unknown("sweep", sweep, {"name", "values"})
    if "name" not in sweep or "values" not in sweep:
        raise ConfigError("[sweep] needs name and values")
    try:
        grid = tuple(float(v) for v in _split(sweep["values"]))
    except ValueError:
        raise ConfigError(f"[sweep] values must be numbers: {sweep['values']!r}") from None

    opts: dict[str, Any] = {}
    for key, text in dict(sections.get("estimators", {})).items():
        if key not in ESTIMATOR_KEYS:
            raise ConfigError(f"unknown key {key!r} in [estimators]")
        kind = ESTIMATOR_KEYS[key]
        if kind == "intlist":
            opts[key] = tuple(_coerce(int, v, key) for v in _split(text))
        else:
            opts[key] = _coerce(kind, text.strip(), key)

    return ExperimentSpec(
        model=model,
        sweep_name=sweep["name"].strip(),
        grid=grid,
        methods=tuple(_split(exp.get("methods", ",".join(METHODS)))),
        trials=_coerce(int, exp.get("trials", "1"), "trials"),
        base_seed=_coerce(int, exp.get("seed", "0"), "seed"),
        params={k: v.strip() for k, v in dict(sections.get("model", {})).items()},
        **opts,
    )


def _reject_unknown(section: str, values: Mapping[str, str], allowed: set[str]) -> None:
    extra = set(values) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(extra)}")
