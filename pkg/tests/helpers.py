"""Independent reference implementations used as test oracles."""
import numpy as np


def random_orthonormal(rng, n, r):
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Q


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def subspace_gap(U, V):
    """Projector distance ||U U^T - V V^T||_2 (sin-theta), independent of the library metrics."""
    return float(np.linalg.norm(U @ U.T - V @ V.T, 2))


def brute_force_select(sigma, r_prev, r, gap_const):
    """Literal candidate-set evaluation on a descending singular-value list (1-based math)."""
    s = [None] + list(sigma)  # s[i] = sigma_i
    candidates = set()
    for rp in range(r_prev + 1, r + 1):
        ratio_ok = s[rp] > 0 and s[r_prev + 1] / s[rp] <= gap_const
        gap_ok = s[rp] - s[rp + 1] >= s[rp] / r
        if ratio_ok and gap_ok:
            candidates.add(rp)
    return max(candidates) if candidates else r


def naive_offdiag_gram(Y):
    n1, n2 = Y.shape
    G = np.zeros((n1, n1))
    for i in range(n1):
        for j in range(n1):
            if i != j:
                G[i, j] = sum(Y[i, k] * Y[j, k] for k in range(n2))
    return G
