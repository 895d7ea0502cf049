"""Trace-driven memory traffic model for RNN inference scheduling."""

from ._core import (
    BenchmarkSpec,
    CacheConfig,
    CellType,
    NetworkConfig,
    Schedule,
    applications,
    compare_schedules,
    dre,
    find_benchmark,
    grid,
    run_final_hidden,
    simulate,
    total_weight_bytes,
    working_set_bytes,
)

__all__ = [
    "BenchmarkSpec",
    "CacheConfig",
    "CellType",
    "NetworkConfig",
    "Schedule",
    "applications",
    "compare_schedules",
    "dre",
    "find_benchmark",
    "grid",
    "run_final_hidden",
    "simulate",
    "total_weight_bytes",
    "working_set_bytes",
]
