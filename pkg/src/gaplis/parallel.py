"""Deterministic fan-out of replica work over an optional process pool.

Results are returned in task order, and every replica derives its own RNG
stream from (master seed, replica index), so a run is bit-identical for
any worker count, including 1.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

__all__ = ["parallel_map", "replica_chunks", "default_workers"]


def default_workers() -> int:
    env = os.environ.get("GAPLIS_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def replica_chunks(n_replicas: int, n_chunks: int) -> list[tuple[int, int]]:
    """Split replica indices 0..n-1 into contiguous [lo, hi) ranges."""
    n_chunks = max(1, min(n_chunks, n_replicas)) if n_replicas else 1
    bounds = [round(i * n_replicas / n_chunks) for i in range(n_chunks + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(n_chunks) if bounds[i] < bounds[i + 1]]


def parallel_map(fn, tasks, workers: int = 1) -> list:
    """Map a picklable function over tasks, in order, optionally in parallel."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, tasks))
