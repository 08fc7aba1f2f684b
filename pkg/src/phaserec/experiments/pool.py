"""Deterministic task fan-out.

Tasks are pure functions of their parameters (each carries its own seed
derived from the master seed and the task coordinates), so any execution
order yields the same numbers.  Results are collected by task index, which
makes output byte-identical whether the work runs inline or on a thread
pool.  Threads are used rather than processes: the heavy kernels release
the interpreter lock inside vectorized numpy sections, and worker
processes would pay the JIT warm-up again.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["resolve_threads", "run_indexed"]

THREADS_ENV_VAR = "PHASEREC_THREADS"


def resolve_threads(explicit: int | None = None) -> int:
    """Pick the worker count: explicit flag, else environment, else 1."""
    if explicit is not None:
        value = int(explicit)
        if value < 1:
            raise ValueError(f"threads must be >= 1, got {value}")
        return value
    env = os.environ.get(THREADS_ENV_VAR)
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(
                f"{THREADS_ENV_VAR} must be an integer, got {env!r}"
            ) from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
        return value
    return 1


def run_indexed(func, params: list, threads: int = 1) -> list:
    """Apply ``func`` to each parameter set; results in input order."""
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(params) <= 1:
        return [func(p) for p in params]
    results = [None] * len(params)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(func, p): i for i, p in enumerate(params)}
        for future, index in futures.items():
            results[index] = future.result()
    return results
