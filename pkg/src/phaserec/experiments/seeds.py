"""Schedule-independent per-task seed derivation.

Every Monte Carlo task derives its seed from the master seed and its own
integer coordinates (grid indices, replicate number, ...) through the
splitmix64 mix function.  A task's stream therefore depends only on what
the task *is*, never on which worker ran it or in what order, which makes
runs bit-reproducible at any parallelism degree.
"""

from __future__ import annotations

import numpy as np

__all__ = ["splitmix64", "task_seed", "task_rng"]

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step: avalanche mix of a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def task_seed(master: int, *coords: int) -> int:
    """Derive a 64-bit seed from the master seed and task coordinates.

    Folds each coordinate in with a splitmix64 step; the empty coordinate
    list returns a mixed master seed, so sub-streams never collide with
    the master stream itself.
    """
    h = splitmix64(master & _MASK)
    for c in coords:
        h = splitmix64(h ^ (int(c) & _MASK))
    return h


def task_rng(master: int, *coords: int) -> np.random.Generator:
    """Generator seeded by :func:`task_seed`."""
    return np.random.default_rng(task_seed(master, *coords))
