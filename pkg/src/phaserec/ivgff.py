"""Integer-valued shifted random field: Gibbs sampling and exact tables.

Conditioned on its phases, a GFF becomes (up to the ``2*pi/T`` scale) an
integer field ``m`` with law

    P(m)  proportional to  exp(-(beta/2) <grad(m+a), grad(m+a)>_E),

``m`` ranging over integer fields that vanish on the boundary and ``a``
the observed shift vector.  This module provides the energy, a
single-site heat-bath Gibbs sampler (jitted, deterministic given its
uniform stream), iterated-conditional-modes ground states, an exact
enumeration oracle for tiny lattices, and coupled-pair draws.

All functions accept the shift either as a :class:`~phaserec.phases.PhaseField`
or as a raw per-vertex float array vanishing on the boundary; raw arrays may
leave ``[0, 1)`` (integer shifts are useful fixtures).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .lattice import Lattice
from .phases import PhaseField

# enumeration caps: interior size, window radius, total configurations
_MAX_ENUM_SITES = 6
_MAX_ENUM_WINDOW = 12
_MAX_ENUM_CONFIGS = 6_000_000


def shift_vector(lattice: Lattice, a) -> np.ndarray:
    """Per-vertex float shift array from a phase field or raw array."""
    if isinstance(a, PhaseField):
        if a.lattice is not lattice:
            raise ValueError("phase field belongs to a different lattice")
        return a.a
    arr = np.asarray(a, dtype=float)
    if arr.shape != (lattice.num_vertices,):
        raise ValueError("shift must have one entry per vertex")
    if np.any(arr[lattice.boundary] != 0.0):
        raise ValueError("shift must vanish on the boundary")
    return arr


def _integer_field(lattice: Lattice, m) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (lattice.num_vertices,):
        raise ValueError("m must have one entry per vertex")
    if not np.issubdtype(m.dtype, np.integer):
        raise ValueError("m must be an integer field")
    if np.any(m[lattice.boundary] != 0):
        raise ValueError("m must vanish on the boundary")
    return m.astype(np.int64)


def energy(lattice: Lattice, m, a, beta: float) -> float:
    """``(beta/2) <grad(m+a), grad(m+a)>_E``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    m = _integer_field(lattice, m)
    av = shift_vector(lattice, a)
    return 0.5 * beta * lattice.dirichlet_energy(m + av)


def heat_bath_window(beta: float, deg: int) -> int:
    """Half-width of the site update window: ``ceil(8/sqrt(beta*deg)) + 2``."""
    return int(np.ceil(8.0 / np.sqrt(beta * deg))) + 2


def site_conditional(
    lattice: Lattice, m, a, beta: float, site: int
) -> tuple[np.ndarray, np.ndarray]:
    """Heat-bath law of one site given the rest: ``(values, probabilities)``.

    Reference (non-jitted) computation of the same windowed law the sweep
    kernel samples from: weights ``exp(-(beta*deg/2)(k + a_i - vbar)^2)``
    over the window around the continuous mode.
    """
    m = _integer_field(lattice, m)
    av = shift_vector(lattice, a)
    if lattice.interior_pos[site] < 0:
        raise ValueError("site must be interior")
    nbrs = lattice.neighbors[site][lattice.neighbors[site] >= 0]
    vbar = float(np.mean(m[nbrs] + av[nbrs]))
    deg = nbrs.size
    c = 0.5 * beta * deg
    t = vbar - av[site]
    center = int(np.floor(t + 0.5))
    W = heat_bath_window(beta, deg)
    values = center + np.arange(-W, W + 1)
    expo = -c * (values + av[site] - vbar) ** 2
    expo -= expo.max()
    w = np.exp(expo)
    return values, w / w.sum()


class IvGibbsChain:
    """Single-site heat-bath chain targeting the shifted integer field.

    The chain owns its state and generator; sweeps visit interior sites in
    a fixed checkerboard order (even ``row+col`` parity first), so a chain
    is a deterministic function of ``(init, seed, sweep count)``.
    """

    def __init__(
        self,
        lattice: Lattice,
        beta: float,
        a,
        init=None,
        rng: np.random.Generator | None = None,
        seed: int | None = None,
    ) -> None:
        if beta <= 0:
            raise ValueError("beta must be positive")
        self.lattice = lattice
        self.beta = float(beta)
        self.a = shift_vector(lattice, a)
        if init is None:
            self.state = np.zeros(lattice.num_vertices, dtype=np.int64)
        else:
            self.state = _integer_field(lattice, init).copy()
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.sweeps_done = 0
        self._order = lattice.checkerboard_interior

    def sweep(self, n_sweeps: int = 1, chunk: int = 256) -> None:
        """Run ``n_sweeps`` systematic heat-bath sweeps in place."""
        left = int(n_sweeps)
        while left > 0:
            k = min(left, chunk)
            U = self.rng.random((k, self._order.size))
            _kernels.gibbs_sweeps(
                self.state, self.a, self.lattice.neighbors, self._order, self.beta, U
            )
            self.sweeps_done += k
            left -= k

    def shifted_field(self) -> np.ndarray:
        """Current ``m + a`` as a float vertex field."""
        return self.state + self.a


def ground_state(
    lattice: Lattice, a, init=None, max_rounds: int = 1000
) -> tuple[np.ndarray, bool]:
    """Coordinate-descent minimiser of ``<grad(m+a), grad(m+a)>``.

    Repeatedly sets every interior site to the integer closest to
    ``vbar - a_i`` (ties round half-up, placing the site residual in
    ``(-1/2, 1/2]``) until a full pass changes nothing.  The inverse
    temperature plays no role in the minimiser.  Returns ``(m, converged)``
    with the current state even when ``max_rounds`` is exhausted.

    The default start is the per-site rounding ``m = -round(a)``, which
    puts every ``m_i + a_i`` in ``[-1/2, 1/2)``; descent from the zero
    field instead can wander into far worse local minima when ``a`` sits
    near the integers (the strongly localized regime).
    """
    av = shift_vector(lattice, a)
    if init is None:
        m = -np.round(av).astype(np.int64)
        m[lattice.boundary] = 0
    else:
        m = _integer_field(lattice, init).copy()
    rounds = _kernels.icm_rounds(
        m, av, lattice.neighbors, lattice.checkerboard_interior, int(max_rounds)
    )
    return m, rounds != -1


@lru_cache(maxsize=16)
def _config_grid(K: int, sites: int) -> np.ndarray:
    """All integer configurations in ``{-K..K}^sites`` (first site slowest)."""
    vals = np.arange(-K, K + 1)
    grids = np.meshgrid(*([vals] * sites), indexing="ij")
    M = np.stack(grids, axis=-1).reshape(-1, sites)
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class IvDistributionTable:
    """Exact probabilities of every configuration in an integer window."""

    lattice: Lattice
    beta: float
    a: np.ndarray = field(repr=False)
    window: int
    support: np.ndarray = field(repr=False)  # (num_configs, num_interior)
    probs: np.ndarray = field(repr=False)
    tail_estimate: float

    def prob_of(self, m) -> float:
        """Probability of a full integer field (0 if outside the window)."""
        m = _integer_field(self.lattice, m)
        mi = m[self.lattice.interior]
        K = self.window
        if np.any(np.abs(mi) > K):
            return 0.0
        base = 2 * K + 1
        idx = 0
        for v in mi:
            idx = idx * base + (int(v) + K)
        return float(self.probs[idx])

    def marginal(self, site: int) -> tuple[np.ndarray, np.ndarray]:
        """Marginal ``(values, probabilities)`` of one interior vertex."""
        pos = self.lattice.interior_pos[site]
        if pos < 0:
            raise ValueError("site must be interior")
        K = self.window
        probs = np.bincount(
            self.support[:, pos] + K, weights=self.probs, minlength=2 * K + 1
        )
        return np.arange(-K, K + 1), probs

    def mean_shifted_field(self) -> np.ndarray:
        """Expected ``m + a`` as a full vertex field."""
        out = np.zeros(self.lattice.num_vertices)
        out[self.lattice.interior] = self.probs @ self.support
        return out + self.a

    def expect(self, values: np.ndarray) -> float:
        """Expectation of a per-configuration statistic array."""
        values = np.asarray(values, dtype=float)
        return float(np.dot(self.probs, values))


def _enum_energies(lattice: Lattice, av: np.ndarray, beta: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    k = lattice.num_interior
    if k > _MAX_ENUM_SITES:
        raise ValueError(f"enumeration limited to {_MAX_ENUM_SITES} interior vertices, got {k}")
    if K > _MAX_ENUM_WINDOW:
        raise ValueError(f"enumeration window limited to {_MAX_ENUM_WINDOW}, got {K}")
    if (2 * K + 1) ** k > _MAX_ENUM_CONFIGS:
        raise ValueError("enumeration window too large for this lattice")
    M = _config_grid(K, k)
    L = lattice.neg_laplacian_interior.toarray()
    V = M + av[lattice.interior]
    E = 0.5 * beta * np.einsum("ij,jk,ik->i", V, L, V)
    return M, E


def enumerate_exact(lattice: Lattice, a, beta: float, K: int) -> IvDistributionTable:
    """Exact distribution over ``m`` in ``{-K..K}^interior``.

    The probabilities are normalized within the window; the recorded
    ``tail_estimate`` is the in-window mass of the outermost shell
    ``max|m| = K``, a proxy for the neglected outside mass.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    av = shift_vector(lattice, a)
    M, E = _enum_energies(lattice, av, beta, K)
    logw = -E
    logZ = logsumexp(logw)
    probs = np.exp(logw - logZ)
    shell = np.max(np.abs(M), axis=1) == K
    return IvDistributionTable(
        lattice=lattice,
        beta=beta,
        a=av,
        window=K,
        support=M,
        probs=probs,
        tail_estimate=float(probs[shell].sum()),
    )


def log_partition(lattice: Lattice, a, beta: float, K: int) -> float:
    """``log`` of the windowed partition sum (fixed window, for derivatives)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    av = shift_vector(lattice, a)
    _, E = _enum_energies(lattice, av, beta, K)
    return float(logsumexp(-E))


@dataclass(frozen=True)
class PairConfig:
    """Budget and initialization for one coupled-pair draw.

    ``sweeps`` is the per-chain burn-in; chain 1 starts from the ground
    state, chain 2 from ``init2``: a rounded lift of a fresh scaled GFF draw
    (``"lift"``, overdispersed), the zero field (``"zero"``), or the same
    ground state as chain 1 (``"ground"``, conservative: the chains then
    differ only through their update noise, which undercounts rare
    large-scale disagreements but avoids planting slow-relaxing plateaus).
    """

    sweeps: int = 1000
    init2: str = "lift"
    ground_rounds: int = 1000


def random_lift_init(
    lattice: Lattice, a, beta: float, rng: np.random.Generator
) -> np.ndarray:
    """Integer field nearest to a fresh GFF draw scaled to the target width.

    The shifted field ``m + a`` at inverse temperature ``beta`` has the GFF
    law scaled by ``1/sqrt(beta)`` in the delocalized regime, so rounding
    ``psi/sqrt(beta) - a`` gives an overdispersed but honest start.
    """
    from .gff import GffSampler

    av = shift_vector(lattice, a)
    psi = GffSampler(lattice).sample(rng) / np.sqrt(beta)
    m = np.floor(psi - av + 0.5).astype(np.int64)
    m[lattice.boundary] = 0
    return m


def sample_pair_info(
    lattice: Lattice,
    a,
    beta: float,
    rng: np.random.Generator,
    config: PairConfig = PairConfig(),
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Terminal states of two independent chains plus a health flag.

    The flag is ``False`` when the ground-state descent used to seed chain 1
    exhausted its round budget; callers treating pairs as samples should
    exclude (and count) such draws.
    """
    av = shift_vector(lattice, a)
    rng1, rng2 = rng.spawn(2)
    m0, ok = ground_state(lattice, av, max_rounds=config.ground_rounds)
    chain1 = IvGibbsChain(lattice, beta, av, init=m0, rng=rng1)
    if config.init2 == "lift":
        init2 = random_lift_init(lattice, av, beta, rng2)
    elif config.init2 == "zero":
        init2 = np.zeros(lattice.num_vertices, dtype=np.int64)
    elif config.init2 == "ground":
        init2 = m0
    else:
        raise ValueError(f"unknown init2 {config.init2!r}")
    chain2 = IvGibbsChain(lattice, beta, av, init=init2, rng=rng2)
    chain1.sweep(config.sweeps)
    chain2.sweep(config.sweeps)
    return chain1.state.copy(), chain2.state.copy(), ok


def sample_pair(
    lattice: Lattice,
    a,
    beta: float,
    rng: np.random.Generator,
    config: PairConfig = PairConfig(),
) -> tuple[np.ndarray, np.ndarray]:
    """Terminal states of two independent chains with diverse starts."""
    m1, m2, _ = sample_pair_info(lattice, a, beta, rng, config)
    return m1, m2
