"""Deterministic random streams and the thread pool used for chunked work."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from hitloc.errors import DomainError

_MASK64 = (1 << 64) - 1
CHUNK_SIZE = 250_000


def stream(seed, chunk=0):
    """Counter-based generator keyed by ``(seed, chunk)``.

    Philox takes a 128-bit key; the low word holds the 64-bit seed and the high
    word the chunk index, so disjoint chunks never share a stream.
    """
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if int(chunk) < 0:
        raise DomainError("chunk index must be >= 0")
    return np.random.Generator(np.random.Philox(key=seed | (int(chunk) << 64)))


def max_workers():
    """Worker cap from ``HITLOC_THREADS``, defaulting to the CPU count."""
    env = os.environ.get("HITLOC_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return os.cpu_count() or 1


def pmap(fn, items):
    """Ordered map over ``items``, threaded up to :func:`max_workers`."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunk_sizes(count, size=CHUNK_SIZE):
    """Split ``count`` into consecutive chunk lengths of at most ``size``."""
    full, rest = divmod(int(count), size)
    return [size] * full + ([rest] if rest else [])
