"""Seeded generators for the synthetic models used in the experiments.

Randomness
----------
Every generator takes a 64-bit ``seed`` and draws from numpy's PCG64 bit
generator seeded by ``SeedSequence(seed, spawn_key=(stream,))``. Each kind of
quantity (signal factors, noise levels, noise entries, ...) has its own fixed
``stream`` id, so for instance changing the noise level never changes the
signal drawn for the same seed. Gaussian variates use numpy's ziggurat
sampler; Poisson variates use numpy's exact sampler (inversion for small means,
PTRS transformed rejection otherwise). Outputs are bit-reproducible for a
given numpy version.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, DimensionError
from .linalg import thin_svd
from .tensor import TuckerFactors

# substream ids
SIGNAL_LEFT = 0
SIGNAL_RIGHT = 1
NOISE_LEVELS = 2
NOISE_ENTRIES = 3
FACTORS = 4
POISSON = 5
TENSOR_BASES = (6, 7, 8)

NOISE_VARIANTS = ("none", "row-hetero-gaussian", "poisson", "tensor-separable")


def substream(seed: int, stream: int) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``."""
    seq = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(seq))


def random_orthonormal(rng: np.random.Generator, n: int, r: int) -> np.ndarray:
    """Orthonormalize an ``n x r`` standard Gaussian matrix (QR, positive ``diag(R)``)."""
    if r > n:
        raise DimensionError(f"cannot draw {r} orthonormal columns in dimension {n}")
    Q, R = np.linalg.qr(rng.standard_normal((n, r)))
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


@dataclass(frozen=True)
class NoiseSpec:
    variant: str = "none"
    omega: float = 0.0

    def __post_init__(self):
        if self.variant not in NOISE_VARIANTS:
            raise ContractError(f"unknown noise variant {self.variant!r}")
        if self.omega < 0:
            raise ContractError("omega must be >= 0")


@dataclass(frozen=True)
class MatrixModelSpec:
    n1: int
    n2: int
    singular_values: tuple[float, ...]
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=float)
        if s.ndim != 1 or s.size == 0 or np.any(s <= 0) or np.any(np.diff(s) > 0):
            raise ContractError("singular values must be positive and nonincreasing")
        if s.size > min(self.n1, self.n2):
            raise DimensionError("rank exceeds min(n1, n2)")

    @property
    def r(self) -> int:
        return len(self.singular_values)


@dataclass(frozen=True)
class NoiseParams:
    omega_max: float
    omega_row: float
    omega_col: float


def default_sigma_min(n1: int, n2: int) -> float:
    """Smallest signal singular value used in the noisy matrix experiments: ``(n1 n2)^(1/4) + sqrt(n1)``."""
    return (n1 * n2) ** 0.25 + n1**0.5


def spectrum_profile(profile: str, r: int, kappa: float, sigma_min: float) -> tuple[float, ...]:
    """Singular values for a named condition-number profile.

    ``spike``
        ``sigma_1 = kappa * sigma_min``, the rest equal ``sigma_min``;
    ``staircase``
        the five-value layout ``(kappa, sqrt(kappa), sqrt(kappa), 1, 1) * sigma_min``
        (requires ``r == 5``);
    ``geometric``
        log-spaced from ``kappa * sigma_min`` down to ``sigma_min``.
    """
    if kappa < 1:
        raise ContractError("kappa must be >= 1")
    if profile == "spike":
        vals = [sigma_min] * r
        vals[0] = kappa * sigma_min
    elif profile == "staircase":
        if r != 5:
            raise ContractError("staircase profile is defined for r = 5")
        k = kappa**0.5
        vals = [kappa, k, k, 1.0, 1.0]
        vals = [v * sigma_min for v in vals]
    elif profile == "geometric":
        vals = list(sigma_min * np.geomspace(kappa, 1.0, r)) if r > 1 else [kappa * sigma_min]
    else:
        raise ContractError(f"unknown spectrum profile {profile!r}")
    return tuple(float(v) for v in vals)


def gen_low_rank(spec: MatrixModelSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random rank-``r`` signal ``X* = U* diag(sigma) V*^T``."""
    U = random_orthonormal(substream(spec.seed, SIGNAL_LEFT), spec.n1, spec.r)
    V = random_orthonormal(substream(spec.seed, SIGNAL_RIGHT), spec.n2, spec.r)
    X = (U * np.asarray(spec.singular_values)) @ V.T
    return X, U, V


def gen_hetero_noise(n1: int, n2: int, omega: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-heteroskedastic Gaussian noise.

    Row levels ``omega_i ~ Unif[0, omega]``; entries ``E[i, j] ~ N(0, omega_i^2)``.
    Returns ``(E, omega_rows)``.
    """
    if omega < 0:
        raise ContractError("omega must be >= 0")
    levels = substream(seed, NOISE_LEVELS).uniform(0.0, omega, size=n1)
    Z = substream(seed, NOISE_ENTRIES).standard_normal((n1, n2))
    return levels[:, None] * Z, levels


def sample_matrix_model(spec: MatrixModelSpec):
    """Draw ``(Y, X*, U*, V*)`` for a Gaussian matrix model."""
    X, U, V = gen_low_rank(spec)
    if spec.noise.variant == "none" or spec.noise.omega == 0:
        return X.copy(), X, U, V
    if spec.noise.variant != "row-hetero-gaussian":
        raise ContractError(f"noise variant {spec.noise.variant!r} not valid for matrix models")
    E, _ = gen_hetero_noise(spec.n1, spec.n2, spec.noise.omega, spec.seed)
    return X + E, X, U, V


def noise_params(variance_matrix) -> NoiseParams:
    """Aggregate noise levels from a matrix of entrywise variances."""
    W = np.asarray(variance_matrix, dtype=float)
    if W.ndim != 2:
        raise DimensionError("variance matrix must be 2-D")
    if np.any(W < 0):
        raise ContractError("variances must be non-negative")
    return NoiseParams(
        omega_max=float(np.sqrt(W.max())),
        omega_row=float(np.sqrt(W.sum(axis=1).max())),
        omega_col=float(np.sqrt(W.sum(axis=0).max())),
    )


def gen_factor_model(
    d: int, n: int, r: int, eigenvalues: Sequence[float], omega: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Samples ``y_j = U* Lambda^{1/2} f_j + eps_j`` stacked as columns of a ``d x n`` matrix."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.shape != (r,) or np.any(lam <= 0) or np.any(np.diff(lam) > 0):
        raise ContractError("need r positive nonincreasing eigenvalues")
    if r > d:
        raise DimensionError("r must not exceed d")
    U = random_orthonormal(substream(seed, SIGNAL_LEFT), d, r)
    F = substream(seed, FACTORS).standard_normal((r, n))
    E, _ = gen_hetero_noise(d, n, omega, seed)
    return (U * np.sqrt(lam)) @ F + E, U


def gen_poisson_pca(
    n1: int, n2: int, r: int, lambda_scale: float, seed: int, noise_seed: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Poisson PCA model with entrywise-positive rank-``r`` mean.

    The mean is ``|U~| diag(lambda^2, lambda, ..., lambda) / 5 |V~|^T`` with
    standard Gaussian ``U~, V~``; ``Y[i, j] ~ Poisson(X*[i, j])``. Returns
    ``(Y, X*, U*)`` where ``U*`` is the left singular basis of ``X*``.
    The Poisson draws come from ``noise_seed`` when given (default ``seed``).
    """
    if lambda_scale <= 0:
        raise ContractError("lambda_scale must be > 0")
    Ub = np.abs(substream(seed, SIGNAL_LEFT).standard_normal((n1, r)))
    Vb = np.abs(substream(seed, SIGNAL_RIGHT).standard_normal((n2, r)))
    scale = np.full(r, float(lambda_scale))
    scale[0] = lambda_scale**2
    X = (Ub * (scale / 5.0)) @ Vb.T
    if not np.all(X > 0):
        raise ArithmeticError("Poisson mean matrix has non-positive entries")
    Y = substream(seed if noise_seed is None else noise_seed, POISSON).poisson(X).astype(float)
    U = thin_svd(X, r)[0]
    return Y, X, U


def tensor_sigma(n: int) -> float:
    """Baseline core magnitude ``n^(3/4)`` of the tensor experiment."""
    return n**0.75


def gen_tensor_model(
    n: int, r: int, kappa: float, omega: float, seed: int, noise_seed: Optional[int] = None
) -> tuple[np.ndarray, TuckerFactors]:
    """Tensor PCA model with a diagonal core and separable heteroskedastic noise.

    The core is diagonal with ``S[0, 0, 0] = kappa * n^(3/4)`` and the remaining
    ``r - 1`` diagonal entries equal to ``n^(3/4)``. Noise entries are
    ``N(0, omega^2 alpha_i^2 beta_j^2 gamma_k^2)`` with ``alpha, beta, gamma``
    drawn uniformly from ``[0, 1]``. The Gaussian entries (but not the
    levels) come from ``noise_seed`` when given.
    """
    if r < 1 or r > n:
        raise DimensionError("need 1 <= r <= n")
    if kappa < 1:
        raise ContractError("kappa must be >= 1")
    if omega < 0:
        raise ContractError("omega must be >= 0")
    sigma = tensor_sigma(n)
    core = np.zeros((r, r, r))
    for k in range(r):
        core[k, k, k] = sigma
    core[0, 0, 0] = kappa * sigma
    bases = tuple(random_orthonormal(substream(seed, s), n, r) for s in TENSOR_BASES)
    factors = TuckerFactors(bases=bases, core=core)
    X = factors.full()
    levels = substream(seed, NOISE_LEVELS).uniform(0.0, 1.0, size=(3, n))
    a, b, c = levels
    std = omega * a[:, None, None] * b[None, :, None] * c[None, None, :]
    E = std * substream(seed if noise_seed is None else noise_seed, NOISE_ENTRIES).standard_normal((n, n, n))
    return X + E, factors
