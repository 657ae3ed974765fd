"""Deterministic row-chunk parallelism for whole-image transforms."""

import os
from concurrent.futures import ThreadPoolExecutor

# Rows per work unit. Small enough to bound temporary-array memory in the
# window engines, large enough to amortize dispatch overhead.
CHUNK_ROWS = 32


def resolve_threads(threads) -> int:
    """Map a thread-count request (None = all cores) to a positive int."""
    if threads is None:
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def run_row_chunks(fn, height: int, threads=1) -> None:
    """
    Invoke fn(row_start, row_stop) over disjoint row bands covering [0, height).

    Each chunk writes to a disjoint slice of preallocated output, so results
    are bit-identical for any thread count or scheduling order.
    """
    threads = resolve_threads(threads)
    bounds = [(s, min(s + CHUNK_ROWS, height)) for s in range(0, height, CHUNK_ROWS)]
    if threads == 1 or len(bounds) == 1:
        for start, stop in bounds:
            fn(start, stop)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for future in [pool.submit(fn, s, e) for s, e in bounds]:
            future.result()
