"""Jitted inner loops for integer-field samplers.

The kernels work on full vertex arrays: ``m`` holds the integer field
(boundary entries fixed at 0 and never visited), ``a`` the real shift per
vertex, ``neighbors`` the lattice's padded neighbour table and ``order``
the interior visit order.  All randomness enters through pre-drawn uniform
arrays, so a kernel call is a pure deterministic function of its inputs.

Site update: with ``vbar`` the neighbour mean of ``m + a``, the heat-bath
law of the site value ``k`` is proportional to
``exp(-c (k + a_i - vbar)^2)`` with ``c = beta * deg / 2``, enumerated over
a window of half-width ``ceil(8 / sqrt(beta * deg)) + 2`` around the
continuous mode.  Weights are built by a two-sided multiplicative
recurrence from the window centre, so each site costs three ``exp`` calls
regardless of window size and the centre weight is exactly 1 (no overflow
at any beta).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _site_weights(c: float, d: float, W: int, w: np.ndarray) -> float:
    """Fill ``w[j] = exp(-c ((j - W) + d)^2 + c d^2)`` for ``j=0..2W``.

    ``d`` is the offset of the window centre from the continuous mode,
    in ``[-1/2, 1/2]``.  Returns the total weight.
    """
    q = np.exp(-2.0 * c)
    up = np.exp(-c * (1.0 + 2.0 * d))
    down = np.exp(-c * (1.0 - 2.0 * d))
    w[W] = 1.0
    acc = 1.0
    total = 1.0
    step = up
    for j in range(W + 1, 2 * W + 1):
        acc *= step
        step *= q
        w[j] = acc
        total += acc
    acc = 1.0
    step = down
    for j in range(W - 1, -1, -1):
        acc *= step
        step *= q
        w[j] = acc
        total += acc
    return total


@njit(cache=True)
def gibbs_sweeps(
    m: np.ndarray,
    a: np.ndarray,
    neighbors: np.ndarray,
    order: np.ndarray,
    beta: float,
    U: np.ndarray,
) -> None:
    """Run ``U.shape[0]`` systematic heat-bath sweeps in place."""
    n_sweeps = U.shape[0]
    for s in range(n_sweeps):
        for idx in range(order.size):
            i = order[idx]
            tot = 0.0
            cnt = 0
            for jj in range(4):
                nb = neighbors[i, jj]
                if nb >= 0:
                    tot += m[nb] + a[nb]
                    cnt += 1
            vbar = tot / cnt
            c = 0.5 * beta * cnt
            t = vbar - a[i]  # continuous mode of the site value
            center = int(np.floor(t + 0.5))
            d = center - t
            W = int(np.ceil(8.0 / np.sqrt(beta * cnt))) + 2
            w = np.empty(2 * W + 1)
            total = _site_weights(c, d, W, w)
            u = U[s, idx] * total
            acc = 0.0
            pick = 2 * W
            for j in range(2 * W + 1):
                acc += w[j]
                if u < acc:
                    pick = j
                    break
            m[i] = center + (pick - W)


@njit(cache=True)
def icm_rounds(
    m: np.ndarray,
    a: np.ndarray,
    neighbors: np.ndarray,
    order: np.ndarray,
    max_rounds: int,
) -> int:
    """Iterated conditional modes: set each site to its minimising integer.

    Sweeps in ``order`` until a full pass changes nothing or ``max_rounds``
    passes run.  Returns the number of passes used, or ``-1`` if the last
    pass still changed sites.  Ties (continuous mode exactly between two
    integers) round half-up, placing the site residual in ``(-1/2, 1/2]``.
    """
    for r in range(max_rounds):
        changed = False
        for idx in range(order.size):
            i = order[idx]
            tot = 0.0
            cnt = 0
            for jj in range(4):
                nb = neighbors[i, jj]
                if nb >= 0:
                    tot += m[nb] + a[nb]
                    cnt += 1
            t = tot / cnt - a[i]
            new = int(np.floor(t + 0.5))
            if new != m[i]:
                m[i] = new
                changed = True
        if not changed:
            return r + 1
    return -1
