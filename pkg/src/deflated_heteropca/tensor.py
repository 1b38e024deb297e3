"""Order-3 tensor algebra and HOOI with spectral initialization.

Tensors are ``(n1, n2, n3)`` float arrays. Modes are numbered 1, 2, 3 in the
public API. The unfolding bijection (written 1-based) is::

    M1[i1, i2 + n2 (i3 - 1)] = M2[i2, i3 + n3 (i1 - 1)] = M3[i3, i1 + n1 (i2 - 1)]
        = X[i1, i2, i3]

so in each unfolding the column index runs fastest over the mode that follows
the row mode (cyclically).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError
from .estimators import DEFAULT_HETERO_ITERS, estimate
from .linalg import projector, thin_svd

# axis order (row axis, slow column axis, fast column axis) per mode
_AXES = {1: (0, 2, 1), 2: (1, 0, 2), 3: (2, 1, 0)}

INIT_METHODS = {"deflated": "deflated", "heteropca": "hetero", "hetero": "hetero",
                "diag-deleted": "diag-del", "diag-del": "diag-del", "svd": "svd"}


@dataclass(frozen=True)
class TuckerFactors:
    """``X = core x_1 U1 x_2 U2 x_3 U3``."""

    bases: tuple[np.ndarray, np.ndarray, np.ndarray]
    core: np.ndarray

    def full(self) -> np.ndarray:
        X = self.core
        for mode, U in enumerate(self.bases, start=1):
            X = mode_product(X, mode, U)
        return X


@dataclass(frozen=True)
class HooiResult:
    bases: tuple[np.ndarray, np.ndarray, np.ndarray]
    estimate: np.ndarray
    initial_bases: tuple[np.ndarray, np.ndarray, np.ndarray]


def _as_tensor(X) -> np.ndarray:
    T = np.asarray(X, dtype=float)
    if T.ndim != 3:
        raise DimensionError(f"expected an order-3 tensor, got shape {T.shape}")
    return T


def _check_mode(mode: int) -> int:
    if mode not in (1, 2, 3):
        raise DimensionError(f"mode must be 1, 2 or 3, got {mode!r}")
    return mode


def next_mode(mode: int, step: int = 1) -> int:
    """Cyclic successor: ``next_mode(3) == 1``."""
    return (mode - 1 + step) % 3 + 1


def matricize(X, mode: int) -> np.ndarray:
    """Mode-``mode`` unfolding, shape ``(n_mode, n1 n2 n3 / n_mode)``."""
    T = _as_tensor(X)
    axes = _AXES[_check_mode(mode)]
    return T.transpose(axes).reshape(T.shape[axes[0]], -1)


def dematricize(M, mode: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`matricize` for a tensor of shape ``dims``."""
    A = np.asarray(M, dtype=float)
    dims = tuple(int(d) for d in dims)
    axes = _AXES[_check_mode(mode)]
    if len(dims) != 3:
        raise DimensionError("dims must have three entries")
    permuted = tuple(dims[a] for a in axes)
    if A.shape != (permuted[0], permuted[1] * permuted[2]):
        raise DimensionError(f"matrix shape {A.shape} inconsistent with dims {dims}, mode {mode}")
    return A.reshape(permuted).transpose(np.argsort(axes))


def mode_product(G, mode: int, V) -> np.ndarray:
    """Multilinear product ``G x_mode V``: contracts mode ``mode`` of ``G`` with the columns of ``V``."""
    T = _as_tensor(G)
    V = np.asarray(V, dtype=float)
    _check_mode(mode)
    if V.ndim != 2 or V.shape[1] != T.shape[mode - 1]:
        raise DimensionError(
            f"V of shape {V.shape} cannot act on mode {mode} of a tensor with dims {T.shape}"
        )
    dims = list(T.shape)
    dims[mode - 1] = V.shape[0]
    return dematricize(V @ matricize(T, mode), mode, dims)


def tensor_frob(X) -> float:
    """Frobenius norm of a tensor."""
    return float(np.sqrt(np.sum(_as_tensor(X) ** 2)))


def _compressed_unfolding(Y: np.ndarray, mode: int, bases: Sequence[np.ndarray]) -> np.ndarray:
    T = Y
    for other in (next_mode(mode, 1), next_mode(mode, 2)):
        T = mode_product(T, other, bases[other - 1].T)
    return matricize(T, mode)


def hooi(
    Y,
    ranks: Sequence[int],
    init: str = "deflated",
    init_iters: Optional[Sequence[int]] = None,
    t_max: int = 10,
    gap_const: float = 4.0,
    hetero_iters: int = DEFAULT_HETERO_ITERS,
) -> HooiResult:
    """Higher-order orthogonal iteration for a noisy low-Tucker-rank tensor.

    Each factor is initialized by running the chosen subspace estimator on the
    corresponding unfolding of ``Y``. Every HOOI round then recomputes all
    three factors from the previous round's factors (Jacobi style): factor
    ``i`` becomes the leading ``r_i`` left singular vectors of the mode-``i``
    unfolding of ``Y`` compressed by the transposes of the other two factors.
    The tensor estimate is ``Y`` projected onto the final three subspaces.

    Parameters
    ----------
    Y : (n1, n2, n3) array_like
    ranks : (r1, r2, r3)
        Tucker ranks, each ``r_i <= n_i - 1``.
    init : {'deflated', 'heteropca', 'diag-deleted', 'svd'}
        Estimator used on each unfolding.
    init_iters : sequence of int, optional
        Per-round iterations for the deflated initializer.
    t_max : int
        Number of HOOI rounds.
    gap_const : float
        Rank-selection threshold for the deflated initializer.
    hetero_iters : int
        Iterations for the HeteroPCA initializer.
    """
    Y = _as_tensor(Y)
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != 3:
        raise DimensionError("ranks must have three entries")
    for n_i, r_i in zip(Y.shape, ranks):
        if not 1 <= r_i <= n_i - 1:
            raise DimensionError(f"rank {r_i} out of range for mode size {n_i}")
    if init not in INIT_METHODS:
        raise ValueError(f"unknown init {init!r}; expected one of {sorted(INIT_METHODS)}")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")

    method = INIT_METHODS[init]
    bases = tuple(
        estimate(
            matricize(Y, mode), ranks[mode - 1], method,
            iters=init_iters, gap_const=gap_const, t_max=hetero_iters,
        ).basis
        for mode in (1, 2, 3)
    )
    initial = bases
    for _ in range(t_max):
        bases = tuple(
            thin_svd(_compressed_unfolding(Y, mode, bases), ranks[mode - 1])[0]
            for mode in (1, 2, 3)
        )
    Xhat = Y
    for mode, U in enumerate(bases, start=1):
        Xhat = mode_product(Xhat, mode, projector(U))
    return HooiResult(bases=bases, estimate=Xhat, initial_bases=initial)
