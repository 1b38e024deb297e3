"""Column-subspace estimators for ``Y = X* + E`` with heteroskedastic noise.

Four estimators are provided, from simplest to most robust:

``svd``
    leading left singular vectors of ``Y``;
``diag-del``
    leading eigenvectors of ``Y Y^T`` with its diagonal zeroed;
``hetero``
    HeteroPCA, which iteratively re-imputes the Gram diagonal from the current
    rank-``r`` reconstruction;
``deflated``
    Deflated-HeteroPCA, which runs HeteroPCA on successively larger,
    well-conditioned blocks of the spectrum selected from the data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractError, DimensionError
from .linalg import (
    SpectrumDecomposition,
    as_matrix,
    offdiag_project,
    thin_svd,
    top_r_eigs,
)

DEFAULT_ROUND_ITERS = 10
DEFAULT_HETERO_ITERS = 100
DEFAULT_GAP_CONST = 4.0

METHODS = ("svd", "diag-del", "hetero", "deflated")


@dataclass(frozen=True)
class HeteroPcaState:
    """One iterate of HeteroPCA.

    ``spectrum`` holds the rank-``rank`` eigendecomposition of the previous
    ``gram`` that produced this one; it is ``None`` for the initial state.
    """

    gram: np.ndarray
    rank: int
    iteration: int = 0
    spectrum: Optional[SpectrumDecomposition] = field(default=None, repr=False)


@dataclass(frozen=True)
class DeflationSchedule:
    """Rank breakpoints ``r_1 < ... < r_k = r`` realized by Deflated-HeteroPCA."""

    breakpoints: tuple[int, ...]
    iters: tuple[int, ...]
    gap_const: float = DEFAULT_GAP_CONST
    gap_fraction_denominator: int = 1

    def __post_init__(self):
        b = self.breakpoints
        if not b or any(x >= y for x, y in zip(b, b[1:])) or b[0] < 1:
            raise ContractError(f"breakpoints must be positive and strictly increasing: {b}")
        if len(self.iters) != len(b) or any(t < 1 for t in self.iters):
            raise ContractError("need one positive iteration count per round")
        if self.gap_const < 4:
            raise ContractError("gap_const must be >= 4")

    def to_dict(self) -> dict:
        return {
            "breakpoints": list(self.breakpoints),
            "iters": list(self.iters),
            "gap_const": self.gap_const,
            "gap_fraction_denominator": self.gap_fraction_denominator,
        }


@dataclass(frozen=True)
class EstimatorResult:
    basis: np.ndarray
    schedule_used: Optional[DeflationSchedule] = None
    gram_final: Optional[np.ndarray] = field(default=None, repr=False)


def gram_offdiag(Y) -> np.ndarray:
    """Return ``Y Y^T`` with its diagonal set to zero.

    The upper triangle is mirrored so the result is exactly symmetric.
    """
    Y = as_matrix(Y, "Y")
    S = Y @ Y.T
    S = np.triu(S) + np.triu(S, 1).T
    return offdiag_project(S)


def _check_rank(r: int, n1: int, upper: int | None = None) -> None:
    upper = n1 if upper is None else upper
    if not 1 <= r <= upper:
        raise DimensionError(f"rank r={r} out of range [1, {upper}] for n1={n1}")


def vanilla_svd_estimate(Y, r: int) -> EstimatorResult:
    """Leading ``r`` left singular vectors of ``Y``."""
    Y = as_matrix(Y, "Y")
    _check_rank(r, Y.shape[0])
    if r <= min(Y.shape):
        left, _, _ = thin_svd(Y, r)
    else:
        left = top_r_eigs(Y @ Y.T, r).basis
    return EstimatorResult(basis=left)


def diag_deleted_estimate(Y, r: int) -> EstimatorResult:
    """Top-``r`` (by magnitude) eigenvectors of the diagonal-deleted Gram matrix."""
    Y = as_matrix(Y, "Y")
    _check_rank(r, Y.shape[0])
    G = gram_offdiag(Y)
    return EstimatorResult(basis=top_r_eigs(G, r).basis, gram_final=G)


def heteropca_step(state: HeteroPcaState) -> HeteroPcaState:
    """Replace the Gram diagonal with that of its rank-``r`` reconstruction.

    Off-diagonal entries are carried over untouched.
    """
    spec = top_r_eigs(state.gram, state.rank)
    new = state.gram.copy()
    np.fill_diagonal(new, (spec.basis**2) @ spec.values)
    return HeteroPcaState(new, state.rank, state.iteration + 1, spec)


def heteropca(
    G_in,
    r: int,
    t_max: int = DEFAULT_HETERO_ITERS,
    tol: Optional[float] = None,
    callback: Optional[Callable[[HeteroPcaState], None]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """HeteroPCA diagonal imputation.

    Runs ``t_max`` imputation steps starting from ``G_in`` and returns the
    final Gram estimate together with its rank-``r`` leading eigenbasis.
    With ``t_max = 0`` this reduces to the eigenbasis of ``G_in`` itself.

    Parameters
    ----------
    G_in : (n, n) array_like
        Symmetric initial Gram matrix, typically ``gram_offdiag(Y)``.
    r : int
        Target rank, ``1 <= r < n``.
    t_max : int
        Number of imputation steps.
    tol : float, optional
        Stop early once an update moves the diagonal by less than ``tol``
        relative to ``||G||_F``. Disabled by default.
    callback : callable, optional
        Called with every new state (after each imputation).

    Returns
    -------
    gram : (n, n) ndarray
    basis : (n, r) ndarray
    """
    G = as_matrix(G_in, "G_in")
    n = G.shape[0]
    if G.shape != (n, n):
        raise DimensionError(f"G_in must be square, got {G.shape}")
    _check_rank(r, n, n - 1)
    if t_max < 0:
        raise ContractError("t_max must be >= 0")
    state = HeteroPcaState(G, r)
    for _ in range(t_max):
        nxt = heteropca_step(state)
        if callback is not None:
            callback(nxt)
        if tol is not None:
            moved = np.linalg.norm(np.diag(nxt.gram) - np.diag(state.gram))
            if moved < tol * np.linalg.norm(nxt.gram):
                state = nxt
                break
        state = nxt
    return state.gram, top_r_eigs(state.gram, r).basis


def singular_spectrum(G) -> np.ndarray:
    """Singular values of a symmetric matrix: ``|eigenvalues|`` sorted descending."""
    A = as_matrix(G, "G")
    w = np.linalg.eigvalsh(0.5 * (A + A.T))
    return np.sort(np.abs(w))[::-1]


def select_rank(G_prev, r_prev: int, r: int, gap_const: float = DEFAULT_GAP_CONST) -> int:
    """Pick the next rank breakpoint from the spectrum of ``G_prev``.

    A candidate ``r'`` in ``(r_prev, r]`` is admissible when the block
    ``r_prev+1 .. r'`` is well conditioned (``sigma_{r_prev+1} / sigma_{r'} <=
    gap_const``) and separated from the rest (``sigma_{r'} - sigma_{r'+1} >=
    sigma_{r'} / r``). The largest admissible candidate is returned, or ``r``
    when none qualifies.
    """
    sigma = singular_spectrum(G_prev)
    n = sigma.size
    if not 0 <= r_prev < r <= n - 1:
        raise ContractError(f"need 0 <= r_prev < r <= n-1; got r_prev={r_prev}, r={r}, n={n}")
    if gap_const < 4:
        raise ContractError("gap_const must be >= 4")
    head = sigma[r_prev]
    chosen = None
    for cand in range(r_prev + 1, r + 1):
        s, s_next = sigma[cand - 1], sigma[cand]
        # ratio test written multiplicatively so a zero sigma_{r'} is handled
        if head <= gap_const * s and s - s_next >= s / r:
            chosen = cand
    return r if chosen is None else chosen


def deflated_heteropca(
    Y,
    r: int,
    iters: Optional[Sequence[int]] = None,
    gap_const: float = DEFAULT_GAP_CONST,
    tol: Optional[float] = None,
    callback: Optional[Callable[[HeteroPcaState], None]] = None,
) -> EstimatorResult:
    """Deflated-HeteroPCA subspace estimate.

    Parameters
    ----------
    Y : (n1, n2) array_like
        Data matrix.
    r : int
        Target rank, ``1 <= r <= n1 - 1``.
    iters : sequence of int, optional
        Per-round HeteroPCA iteration counts. The last entry is reused when
        more rounds are needed; surplus entries are ignored. Defaults to 10
        for every round.
    gap_const : float
        Conditioning threshold of the rank-selection rule (``>= 4``).
    tol, callback
        Forwarded to :func:`heteropca` in every round.

    Returns
    -------
    EstimatorResult
        ``basis`` is the final ``(n1, r)`` estimate; ``schedule_used`` the
        realized breakpoints and iteration counts; ``gram_final`` the last
        Gram estimate.
    """
    Y = as_matrix(Y, "Y")
    n1 = Y.shape[0]
    _check_rank(r, n1, n1 - 1)
    if iters is None:
        iters = (DEFAULT_ROUND_ITERS,)
    iters = tuple(int(t) for t in iters)
    if not iters:
        raise ContractError("iters must be non-empty")
    if any(t < 1 for t in iters):
        raise ContractError("iteration counts must be >= 1")

    G = gram_offdiag(Y)
    r_k = 0
    breakpoints: list[int] = []
    used: list[int] = []
    basis = None
    while r_k < r:
        r_k = select_rank(G, r_k, r, gap_const)
        t_k = iters[min(len(breakpoints), len(iters) - 1)]
        G, basis = heteropca(G, r_k, t_k, tol=tol, callback=callback)
        breakpoints.append(r_k)
        used.append(t_k)
    schedule = DeflationSchedule(tuple(breakpoints), tuple(used), float(gap_const), r)
    return EstimatorResult(basis=basis, schedule_used=schedule, gram_final=G)


def estimate(Y, r: int, method: str, **options) -> EstimatorResult:
    """Dispatch to one of :data:`METHODS`.

    Recognized options: ``t_max`` (hetero), ``iters``, ``gap_const`` and
    ``tol`` (deflated; ``tol`` also applies to hetero).
    """
    if method == "svd":
        return vanilla_svd_estimate(Y, r)
    if method == "diag-del":
        return diag_deleted_estimate(Y, r)
    if method == "hetero":
        G0 = gram_offdiag(Y)
        G, U = heteropca(G0, r, options.get("t_max", DEFAULT_HETERO_ITERS), tol=options.get("tol"))
        return EstimatorResult(basis=U, gram_final=G)
    if method == "deflated":
        return deflated_heteropca(
            Y,
            r,
            iters=options.get("iters"),
            gap_const=options.get("gap_const", DEFAULT_GAP_CONST),
            tol=options.get("tol"),
        )
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
