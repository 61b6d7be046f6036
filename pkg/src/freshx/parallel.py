"""Ordered process-pool map used by the extraction and testing tiers."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_workers(workers: int | None) -> int:
    """Explicit value, else ``FRESHX_JOBS``, else 1."""
    if workers is None:
        env = os.environ.get("FRESHX_JOBS")
        workers = int(env) if env else 1
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def ordered_map(fn, tasks, workers: int = 1):
    """``map(fn, tasks)`` evaluated on ``workers`` processes; results keep task order.

    Task boundaries never depend on ``workers``, so results are identical for any
    worker count.
    """
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))
