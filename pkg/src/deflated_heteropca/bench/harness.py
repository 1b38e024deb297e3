"""Monte-Carlo sweep runner.

Seeds
-----
The data for one cell is generated from ``derive_seed(base_seed, model,
grid_value, trial)``: the first 8 bytes (little endian) of the BLAKE2b digest
of ``"{base_seed}|{model}|{float(grid_value)!r}|{trial}"``. The seed does not
depend on the method, so all methods see the same data, and it does not
depend on the position of the grid value or on how many trials are run.
"""
from __future__ import annotations

import csv
import hashlib
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import HeteroPCAError
from ..estimators import estimate
from ..linalg import dist_spectral, dist_two_inf
from ..synthgen import (
    MatrixModelSpec,
    NoiseSpec,
    gen_factor_model,
    gen_poisson_pca,
    gen_tensor_model,
    default_sigma_min,
    sample_matrix_model,
    spectrum_profile,
)
from ..tensor import INIT_METHODS, hooi, tensor_frob
from .config import ExperimentSpec

CSV_HEADER = ("method", "sweep_name", "sweep_value", "err_l2", "err_2inf", "trials", "seconds")
RAW_HEADER = ("method", "sweep_name", "sweep_value", "trial", "seed",
              "err_l2", "err_2inf", "tensor_err", "seconds")

# tensor-model method names map onto HOOI initializers
_TENSOR_INIT = {"svd": "svd", "diag-del": "diag-deleted", "hetero": "heteropca", "deflated": "deflated"}
assert set(_TENSOR_INIT.values()) <= set(INIT_METHODS)


class SweepError(HeteroPCAError):
    """A single cell of a sweep failed; the message identifies the cell."""


@dataclass(frozen=True)
class TrialResult:
    err_l2: float
    err_2inf: float
    seconds: float = 0.0
    tensor_err: Optional[float] = None


@dataclass(frozen=True)
class SweepRow:
    method: str
    sweep_name: str
    sweep_value: float
    err_l2: float
    err_2inf: float
    trials: int
    seconds: float


@dataclass(frozen=True)
class RawRow:
    method: str
    sweep_name: str
    sweep_value: float
    trial: int
    seed: int
    result: TrialResult


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    raw: list[RawRow] = field(default_factory=list)

    def row(self, method: str, sweep_value: float) -> SweepRow:
        for row in self.rows:
            if row.method == method and row.sweep_value == sweep_value:
                return row
        raise KeyError((method, sweep_value))


def derive_seed(base_seed: int, model: str, grid_value: float, trial: int) -> int:
    key = f"{int(base_seed)}|{model}|{float(grid_value)!r}|{int(trial)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def _generate(spec: ExperimentSpec, grid_value: float, seed: int):
    p = spec.resolved_params(grid_value)
    if spec.model == "matrix":
        sigma_min = p["sigma_min"] or default_sigma_min(p["n1"], p["n2"])
        sv = spectrum_profile(p["profile"], p["r"], p["kappa"], sigma_min)
        noise = NoiseSpec("row-hetero-gaussian", p["omega"]) if p["omega"] > 0 else NoiseSpec()
        Y, _, U, _ = sample_matrix_model(MatrixModelSpec(p["n1"], p["n2"], sv, noise, seed))
        return Y, U, p["r"]
    if spec.model == "factor":
        d, n, r = p["d"], p["n"], p["r"]
        lam_min = p["lambda_min"] or ((d / n) ** 0.5 + d / n) * p["lambda_factor"]
        lam = [lam_min] * r
        lam[0] = p["kappa"] * lam_min
        Y, U = gen_factor_model(d, n, r, lam, p["omega"], seed)
        return Y, U, r
    if spec.model == "poisson":
        Y, _, U = gen_poisson_pca(p["n1"], p["n2"], p["r"], p["lambda"], seed)
        return Y, U, p["r"]
    Y, factors = gen_tensor_model(p["n"], p["r"], p["kappa"], p["omega"], seed)
    return Y, factors, p["r"]


def _evaluate(spec: ExperimentSpec, data, method: str) -> TrialResult:
    Y, truth, r = data
    start = time.perf_counter()
    if spec.model == "tensor":
        res = hooi(
            Y, (r, r, r), init=_TENSOR_INIT[method], init_iters=spec.iters,
            t_max=spec.hooi_iters, gap_const=spec.gap_const, hetero_iters=spec.t_max,
        )
        elapsed = time.perf_counter() - start
        bases = res.bases if spec.tensor_stage == "final" else res.initial_bases
        l2 = max(dist_spectral(U, Us) for U, Us in zip(bases, truth.bases))
        l2inf = max(dist_two_inf(U, Us) for U, Us in zip(bases, truth.bases))
        return TrialResult(l2, l2inf, elapsed, tensor_frob(res.estimate - truth.full()))
    U = estimate(Y, r, method, t_max=spec.t_max, iters=spec.iters, gap_const=spec.gap_const).basis
    elapsed = time.perf_counter() - start
    return TrialResult(dist_spectral(U, truth), dist_two_inf(U, truth), elapsed)


def run_trial(spec: ExperimentSpec, grid_point: float, method: str, trial_index: int) -> TrialResult:
    """Generate one dataset and score one method on it.

    For tensor models ``err_l2``/``err_2inf`` are the worst of the three
    modes and ``tensor_err`` is the Frobenius error of the tensor estimate.
    """
    seed = derive_seed(spec.base_seed, spec.model, grid_point, trial_index)
    return _evaluate(spec, _generate(spec, grid_point, seed), method)


def _run_cell(args) -> tuple[int, int, int, dict[str, TrialResult]]:
    spec, grid_index, trial = args
    value = spec.grid[grid_index]
    seed = derive_seed(spec.base_seed, spec.model, value, trial)
    method = None
    try:
        data = _generate(spec, value, seed)
        out = {}
        for method in spec.methods:
            out[method] = _evaluate(spec, data, method)
    except Exception as exc:
        where = f"method={method}, " if method else ""
        raise SweepError(
            f"cell failed ({where}{spec.sweep_name}={value}, trial={trial}, seed={seed}): {exc}"
        ) from exc
    return grid_index, trial, seed, out


def run_sweep(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every (grid point, method, trial) cell and average over trials.

    Cells may run in parallel (``jobs > 1``); the reduction always visits
    trials in ascending order, so results do not depend on scheduling.
    """
    cells = [(spec, g, t) for g in range(len(spec.grid)) for t in range(spec.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_cell, cells))
    else:
        outputs = [_run_cell(c) for c in cells]
    table = {(g, t): (seed, out) for g, t, seed, out in outputs}

    result = SweepResult()
    for g, value in enumerate(spec.grid):
        for method in spec.methods:
            trials = [table[(g, t)][1][method] for t in range(spec.trials)]
            result.rows.append(SweepRow(
                method=method,
                sweep_name=spec.sweep_name,
                sweep_value=float(value),
                err_l2=math.fsum(tr.err_l2 for tr in trials) / len(trials),
                err_2inf=math.fsum(tr.err_2inf for tr in trials) / len(trials),
                trials=len(trials),
                seconds=math.fsum(tr.seconds for tr in trials),
            ))
            for t, tr in enumerate(trials):
                result.raw.append(RawRow(method, spec.sweep_name, float(value), t, table[(g, t)][0], tr))
    result.rows.sort(key=lambda r: (r.method, r.sweep_value))
    result.raw.sort(key=lambda r: (r.method, r.sweep_value, r.trial))
    return result


def fmt(x: Optional[float]) -> str:
    """17-significant-digit decimal, which round-trips any float64."""
    return "" if x is None else f"{x:.17g}"


def emit_csv(result: SweepResult, path: str | Path, timing: bool = True) -> None:
    """Write the per-(method, grid point) means.

    With ``timing=False`` the ``seconds`` column is written as 0 so that the
    file is byte-identical across runs.
    """
    rows = sorted(result.rows, key=lambda r: (r.method, r.sweep_value))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.method, r.sweep_name, fmt(r.sweep_value), fmt(r.err_l2), fmt(r.err_2inf),
                        r.trials, fmt(r.seconds if timing else 0.0)])


def emit_raw_csv(result: SweepResult, path: str | Path, timing: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_HEADER)
        for r in result.raw:
            tr = r.result
            w.writerow([r.method, r.sweep_name, fmt(r.sweep_value), r.trial, r.seed,
                        fmt(tr.err_l2), fmt(tr.err_2inf), fmt(tr.tensor_err),
                        fmt(tr.seconds if timing else 0.0)])


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
