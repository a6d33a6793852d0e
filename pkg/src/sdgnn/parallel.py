"""Worker-count resolution and an order-preserving parallel map.

The SDMP_THREADS environment variable caps worker parallelism for
per-node stages (0 or unset = auto). Results are always assembled in
input order, so parallel execution is indistinguishable from
sequential execution.
"""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError


def resolve_workers(requested=None):
    """Number of workers to use, honoring the SDMP_THREADS cap."""
    cap = os.environ.get("SDMP_THREADS", "0").strip()
    try:
        cap = int(cap) if cap else 0
    except ValueError:
        raise ConfigError(f"SDMP_THREADS must be an integer, got {cap!r}")
    if cap < 0:
        raise ConfigError("SDMP_THREADS must be >= 0")
    auto = os.cpu_count() or 1
    limit = cap if cap > 0 else auto
    if requested is None:
        return limit
    return max(1, min(requested, limit))


def ordered_map(fn, items, workers=None):
    """Apply fn to each item, returning results in input order."""
    workers = resolve_workers(workers)
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
