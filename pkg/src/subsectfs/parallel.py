"""Worker-count control via the SUBSECTFS_THREADS environment variable."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .core import DomainError

THREADS_ENV_VAR = "SUBSECTFS_THREADS"


def worker_count() -> int:
    """Configured cap on concurrent workers; 0 or unset means auto."""
    raw = os.environ.get(THREADS_ENV_VAR, "0").strip()
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 0:
        raise DomainError(f"{THREADS_ENV_VAR} must be >= 0")
    if value == 0:
        return os.cpu_count() or 1
    return value


def ordered_map(fn, items):
    """Apply fn to items, results in input order regardless of scheduling."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
