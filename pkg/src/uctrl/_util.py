"""Small shared helpers."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_budget() -> int:
    """Parallelism cap from the UCTRL_THREADS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get("UCTRL_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving input order; fans out over threads when UCTRL_THREADS
    allows it (the workloads are pure and numpy releases the GIL)."""
    items = list(items)
    workers = thread_budget()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
