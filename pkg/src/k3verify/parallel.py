"""Index-partitioned trial execution.

Trials are pure functions of ``(seed, index)``, so running them serially or in a
process pool gives the same ordered list of results; the thread count can never
change a report.  Processes are used instead of threads because the work is pure
Python arithmetic (the GIL would serialize threads anyway).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial

ENV_THREADS = "K3VERIFY_THREADS"


def default_workers() -> int:
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_indexed(fn, indices, workers: int = 1, **kwargs) -> list:
    """Return ``[fn(i, **kwargs) for i in indices]``, possibly in parallel."""
    indices = list(indices)
    call = partial(fn, **kwargs) if kwargs else fn
    if workers <= 1 or len(indices) <= 1:
        return [call(i) for i in indices]
    chunk = max(1, len(indices) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(call, indices, chunksize=chunk))
