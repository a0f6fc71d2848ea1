"""Deterministic chunked execution over an index space."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def default_jobs() -> int:
    return os.cpu_count() or 1


def chunk_ranges(total: int, chunks: int) -> list[tuple[int, int]]:
    """Split ``[0, total)`` into at most ``chunks`` contiguous, nearly equal ranges."""
    chunks = max(1, min(chunks, total)) if total else 1
    size, extra = divmod(total, chunks)
    out, lo = [], 0
    for k in range(chunks):
        hi = lo + size + (1 if k < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def map_chunks(fn: Callable, argsets: Sequence[tuple], jobs: int = 1) -> list:
    """Apply ``fn(*args)`` to every argset; results come back in input order.

    With ``jobs > 1`` the calls run in worker processes, so ``fn`` and its
    arguments must be picklable.
    """
    if jobs <= 1 or len(argsets) <= 1:
        return [fn(*args) for args in argsets]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *args) for args in argsets]
        return [f.result() for f in futures]
