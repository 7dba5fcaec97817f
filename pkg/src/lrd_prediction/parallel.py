#!/usr/bin/env python3
"""
Worker sizing and ordered parallel maps.

Independent sweep points (Baxter sweeps, Monte Carlo replicates) are fanned
out over a thread pool. The pool is sized from ``LRD_THREADS`` or, when that
is 0, from the current machine load. Results always come back in input
order so aggregates do not depend on scheduling.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, TypeVar

import psutil

from .config import config
from .errors import ConfigurationError

logger = logging.getLogger("lrd-prediction.parallel")

T = TypeVar("T")
R = TypeVar("R")

# Thread cap set by the CLI --threads flag; None defers to config.threads.
_thread_cap: Optional[int] = None


@dataclass(frozen=True)
class LoadSnapshot:
    """Local machine load."""
    cpu_percent: float
    memory_percent: float
    load_1m: float
    cpu_count: int

    @property
    def memory_pressure(self) -> bool:
        return self.memory_percent > config.memory_threshold

    def to_dict(self) -> Dict[str, float]:
        return {
            "cpu_percent": round(self.cpu_percent, 1),
            "memory_percent": round(self.memory_percent, 1),
            "load_1m": round(self.load_1m, 2),
            "cpu_count": self.cpu_count,
        }


def load_snapshot() -> LoadSnapshot:
    """Sample CPU, memory and load average."""
    count = os.cpu_count() or 1
    try:
        cpu = psutil.cpu_percent(interval=0.1)
        memory = psutil.virtual_memory().percent
        load = psutil.getloadavg()[0]
    except (OSError, AttributeError) as e:
        logger.debug(f"System load unavailable: {e}")
        return LoadSnapshot(cpu_percent=0.0, memory_percent=0.0, load_1m=0.0, cpu_count=count)
    return LoadSnapshot(cpu_percent=cpu, memory_percent=memory, load_1m=load, cpu_count=count)


def set_thread_cap(threads: Optional[int]) -> None:
    """Override the worker count for this process (None restores the default)."""
    global _thread_cap
    if threads is not None and (int(threads) != threads or threads < 0):
        raise ConfigurationError(f"threads must be a nonnegative integer, got {threads}")
    _thread_cap = None if threads is None else int(threads)


def default_workers() -> int:
    """Number of workers for the next parallel map.

    An explicit cap wins; otherwise idle cores are used, with a single worker
    under memory pressure.
    """
    cap = _thread_cap if _thread_cap is not None else config.threads
    if cap and cap > 0:
        return cap

    snapshot = load_snapshot()
    if snapshot.memory_pressure:
        logger.warning(f"Memory at {snapshot.memory_percent:.0f}%, running single-threaded")
        return 1
    idle = int(snapshot.cpu_count - snapshot.load_1m)
    return max(1, min(snapshot.cpu_count, idle))


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Apply ``func`` to every item, returning results in input order.

    The first exception raised by any call propagates.
    """
    items = list(items)
    if not items:
        return []
    workers = min(workers or default_workers(), len(items))
    if workers == 1:
        return [func(item) for item in items]

    logger.debug(f"Mapping {len(items)} items over {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


__all__ = [
    "LoadSnapshot",
    "load_snapshot",
    "set_thread_cap",
    "default_workers",
    "ordered_map",
]
