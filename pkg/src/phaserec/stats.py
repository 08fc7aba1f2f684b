"""Small statistical helpers shared across modules."""

from __future__ import annotations

import numpy as np


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line through ``(x, y)``.

    Returns ``(slope, intercept, r_squared)``.  ``r_squared`` is 1.0 for a
    constant ``y`` fitted exactly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need at least two points")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    centered = y - y.mean()
    ss_tot = float(np.dot(centered, centered))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r2)


def split_r_hat(chains: np.ndarray) -> float:
    """Split-chain potential scale reduction factor.

    ``chains`` has shape ``(num_chains, num_samples)``; each chain is split in
    half, and the classical between/within variance ratio is returned.  Values
    near 1 indicate the chains are sampling the same distribution.  Returns 1.0
    when every split chain is constant and equal, ``inf`` when within-chain
    variance vanishes but the chains disagree.
    """
    chains = np.atleast_2d(np.asarray(chains, dtype=float))
    m, n = chains.shape
    if n < 4:
        raise ValueError("need at least 4 samples per chain to split")
    half = n // 2
    split = np.concatenate([chains[:, :half], chains[:, half : 2 * half]], axis=0)
    means = split.mean(axis=1)
    variances = split.var(axis=1, ddof=1)
    W = float(variances.mean())
    B_over_n = float(means.var(ddof=1))  # = B / n_split
    if W == 0.0:
        return 1.0 if B_over_n == 0.0 else float("inf")
    n_split = half
    var_plus = (n_split - 1) / n_split * W + B_over_n
    return float(np.sqrt(var_plus / W))


def tree_sum(values: np.ndarray) -> float:
    """Sum in a fixed pairwise-tree order.

    The reduction order depends only on the sequence length, never on how the
    values were produced or chunked, so results are bit-reproducible across
    worker counts.
    """
    vals = np.asarray(values, dtype=float).ravel().copy()
    k = vals.size
    if k == 0:
        return 0.0
    while k > 1:
        half = k // 2
        vals[:half] = vals[:half] + vals[half : 2 * half]
        if k % 2 == 1:
            vals[half] = vals[k - 1]
            k = half + 1
        else:
            k = half
    return float(vals[0])


def tree_mean(values: np.ndarray) -> float:
    """Mean computed with :func:`tree_sum` (bit-reproducible)."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("mean of empty sequence")
    return tree_sum(values) / values.size
