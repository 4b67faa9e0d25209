"""Banded Cholesky factorization: reference, blocked and task-parallel."""

from ._bandchol import (
    BandedMatrix,
    BandcholError,
    BandwidthNotDivisibleError,
    NotPositiveDefiniteError,
    available_backends,
    count_flops_instrumented,
    factor_blocked_parallel,
    factor_blocked_serial,
    factor_reference,
    flops_approx,
    flops_exact,
    generate_spd,
    pad_bandwidth,
    physical_core_count,
    residual_norm,
    restrict_bandwidth,
    select_grid_dim,
    solve,
)

__all__ = [
    "BandedMatrix",
    "BandcholError",
    "BandwidthNotDivisibleError",
    "NotPositiveDefiniteError",
    "available_backends",
    "count_flops_instrumented",
    "factor_blocked_parallel",
    "factor_blocked_serial",
    "factor_reference",
    "flops_approx",
    "flops_exact",
    "generate_spd",
    "pad_bandwidth",
    "physical_core_count",
    "residual_norm",
    "restrict_bandwidth",
    "select_grid_dim",
    "solve",
]
