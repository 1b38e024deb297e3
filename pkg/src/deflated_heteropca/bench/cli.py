"""Command-line interface: ``dhpca estimate | sweep | tensor``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError, DimensionError, ContractError, SingularityError
from ..estimators import METHODS, estimate
from ..linalg import dist_spectral, dist_two_inf
from ..synthgen import gen_tensor_model
from ..tensor import INIT_METHODS, hooi, tensor_frob
from .config import load_experiment
from .harness import SweepError, emit_csv, emit_raw_csv, run_sweep
from .io import read_matrix_csv, read_tensor, write_matrix_csv, write_tensor

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dhpca", description="Heteroskedastic PCA estimators and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    est = sub.add_parser("estimate", help="estimate the column subspace of a CSV matrix")
    est.add_argument("input", help="matrix CSV (no header)")
    est.add_argument("--rank", type=int, required=True)
    est.add_argument("--method", choices=METHODS, default="deflated")
    est.add_argument("--iters", type=_int_list, default=None,
                     help="per-round iterations for deflated, e.g. 10,10")
    est.add_argument("--gap-const", type=float, default=4.0)
    est.add_argument("--t-max", type=int, default=100, help="HeteroPCA iterations")
    est.add_argument("--out", required=True, help="output basis CSV")

    sw = sub.add_parser("sweep", help="run an experiment config and write a results CSV")
    sw.add_argument("config")
    sw.add_argument("--trials", type=int, default=None, help="override the config trial count")
    sw.add_argument("--seed", type=int, default=None, help="override the config base seed")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out", required=True)
    sw.add_argument("--raw", action="store_true", help="also write per-trial rows to <out>.raw.csv")
    sw.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column")

    tn = sub.add_parser("tensor", help="HOOI on a tensor file or a generated tensor model")
    tn.add_argument("input", nargs="?", help="tensor file (header 'n1 n2 n3' + mode-1 unfolding)")
    tn.add_argument("--generate", action="store_true", help="draw a synthetic tensor instead")
    tn.add_argument("--n", type=int, default=50)
    tn.add_argument("--kappa", type=float, default=6.0)
    tn.add_argument("--omega", type=float, default=1.0)
    tn.add_argument("--seed", type=int, default=0)
    tn.add_argument("--rank", type=_int_list, required=True, help="r or r1,r2,r3")
    tn.add_argument("--method", choices=sorted(INIT_METHODS), default="deflated")
    tn.add_argument("--iters", type=_int_list, default=None)
    tn.add_argument("--gap-const", type=float, default=4.0)
    tn.add_argument("--t-max", type=int, default=50, help="HOOI rounds")
    tn.add_argument("--out", required=True, help="output prefix")
    return p


def _cmd_estimate(args) -> int:
    Y = read_matrix_csv(args.input)
    res = estimate(Y, args.rank, args.method, t_max=args.t_max, iters=args.iters,
                   gap_const=args.gap_const)
    write_matrix_csv(res.basis, args.out)
    if res.schedule_used is not None:
        Path(args.out + ".schedule.json").write_text(
            json.dumps(res.schedule_used.to_dict(), indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = load_experiment(args.config)
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if overrides:
        spec = replace(spec, **overrides)
    result = run_sweep(spec, jobs=max(1, args.jobs))
    emit_csv(result, args.out, timing=not args.no_timing)
    if args.raw:
        emit_raw_csv(result, args.out + ".raw.csv", timing=not args.no_timing)
    return EXIT_OK


def _cmd_tensor(args) -> int:
    truth = None
    if args.generate:
        if len(args.rank) != 1:
            raise ConfigError("--generate uses a single --rank value")
        Y, truth = gen_tensor_model(args.n, args.rank[0], args.kappa, args.omega, args.seed)
    elif args.input:
        Y = read_tensor(args.input)
    else:
        raise ConfigError("give a tensor file or --generate")
    ranks = args.rank * 3 if len(args.rank) == 1 else args.rank
    if len(ranks) != 3:
        raise ConfigError("--rank takes one or three values")

    res = hooi(Y, ranks, init=args.method, init_iters=args.iters, t_max=args.t_max,
               gap_const=args.gap_const)
    for mode, U in enumerate(res.bases, start=1):
        write_matrix_csv(U, f"{args.out}_U{mode}.csv")
    write_tensor(res.estimate, f"{args.out}_Xhat.txt")
    report = {
        "dims": list(Y.shape),
        "ranks": list(ranks),
        "init": args.method,
        "hooi_iters": args.t_max,
        "residual_frob": tensor_frob(Y - res.estimate),
    }
    if truth is not None:
        Xstar = truth.full()
        report["dist_spectral"] = [dist_spectral(U, Us) for U, Us in zip(res.bases, truth.bases)]
        report["dist_two_inf"] = [dist_two_inf(U, Us) for U, Us in zip(res.bases, truth.bases)]
        report["tensor_err"] = tensor_frob(res.estimate - Xstar)
        report["tensor_rel_err"] = report["tensor_err"] / tensor_frob(Xstar)
    text = json.dumps(report, indent=2)
    Path(f"{args.out}_report.json").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


_NUMERIC = (SingularityError, np.linalg.LinAlgError, ArithmeticError, FloatingPointError)
_DATA = (DataError, DimensionError, ContractError, OSError)


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, SweepError) and exc.__cause__ is not None:
        exc = exc.__cause__
    if isinstance(exc, ConfigError):
        return EXIT_USAGE
    if isinstance(exc, _NUMERIC):
        return EXIT_NUMERIC
    if isinstance(exc, _DATA):
        return EXIT_DATA
    return EXIT_NUMERIC if isinstance(exc, SweepError) else EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"estimate": _cmd_estimate, "sweep": _cmd_sweep, "tensor": _cmd_tensor}[args.command]
    try:
        return handler(args)
    except (ConfigError, SweepError, *_DATA, *_NUMERIC) as exc:
        print(f"dhpca {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
