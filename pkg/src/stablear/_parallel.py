"""Thread-pool helper honoring the STABLE_AR_THREADS environment variable.

Results are returned in input order, so outputs never depend on the worker
count; the density kernels release the GIL, which is where the time goes.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map"]


def thread_count() -> int:
    env = os.environ.get("STABLE_AR_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def parallel_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    k = thread_count() if threads is None else max(1, threads)
    if k == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(k, len(items))) as pool:
        return list(pool.map(fn, items))
