"""Order-preserving thread pool. The compiled kernels release the GIL."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("ECOEVO_THREADS", "").strip()
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    items = list(items)
    n = worker_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
