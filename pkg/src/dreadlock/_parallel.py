"""Order-preserving thread pool capped by ``DREADLOCK_THREADS``."""

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "DREADLOCK_THREADS"


def worker_count(workers=None):
    if workers is None:
        env = os.environ.get(ENV_VAR, "").strip()
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def parallel_map(fn, items, workers=None):
    """``list(map(fn, items))`` spread over threads; output order matches input."""
    items = list(items)
    n = min(worker_count(workers), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
