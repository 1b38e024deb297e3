"""Subspace estimation under heteroskedastic noise.

The main entry point is :func:`deflated_heteropca`, which estimates the
column subspace of a low-rank matrix observed with heteroskedastic noise and
is insensitive to the condition number of the signal. Comparator estimators,
a HOOI tensor pipeline and synthetic-data generators are also provided.
"""
from .estimators import (
    DeflationSchedule,
    EstimatorResult,
    HeteroPcaState,
    deflated_heteropca,
    diag_deleted_estimate,
    estimate,
    gram_offdiag,
    heteropca,
    heteropca_step,
    select_rank,
    vanilla_svd_estimate,
)
from .linalg import (
    dist_spectral,
    dist_two_inf,
    incoherence,
    optimal_rotation,
    sign_matrix,
    thin_svd,
    top_r_eigs,
)
from .tensor import hooi, matricize, mode_product, tensor_frob

__version__ = "0.1.0"
