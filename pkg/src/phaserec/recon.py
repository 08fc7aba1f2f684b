"""Statistical reconstruction of the field from its phases.

The reconstruction function is the conditional mean ``F_T = E[phi | phases]``,
estimated by averaging Gibbs states of the integer model over multiple
chains.  The quality of any reconstruction is measured through coupled
pairs: two conditionally independent samples ``phi_1, phi_2`` given the same
phases, with ``(1/2) E[<phi_1 - phi_2, f>^2]`` equal to the conditional
variance of ``<phi, f>``.  A sweep of that quantity against the Green
function ratio traces the localization/delocalization transition in the
observation period ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ivgff
from .gff import GffSampler
from .lattice import Lattice
from .phases import TWO_PI, PhaseField, beta_of, observe
from .stats import split_r_hat


@dataclass(frozen=True)
class SamplerConfig:
    """Chain budget for conditional-mean estimation.

    ``n_samples`` states are kept per chain, one every ``thinning`` sweeps,
    after ``burn_in`` sweeps.  Convergence is judged by the split potential
    scale reduction of scalar traces against ``rhat_threshold``.
    """

    burn_in: int = 1000
    thinning: int = 10
    n_samples: int = 100
    n_chains: int = 2
    rhat_threshold: float = 1.1


@dataclass(frozen=True)
class ReconResult:
    """Conditional-mean field estimate with convergence diagnostics."""

    mean_field: np.ndarray
    per_site_var: np.ndarray
    diagnostics: dict
    meta: dict
    converged: bool


@dataclass(frozen=True)
class VarianceEstimate:
    """Monte Carlo estimate of a conditional variance.

    ``value`` is the point estimate, ``std_error`` its standard error over
    the ``n_disorder`` outer draws (each averaging ``n_chain_pairs`` inner
    pairs); ``n_excluded`` counts pairs dropped by the health flag.
    """

    value: float
    std_error: float
    n_disorder: int
    n_chain_pairs: int
    n_excluded: int = 0


def _chain_inits(
    lattice: Lattice, av: np.ndarray, beta: float, n_chains: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Diverse starting states: the ground state, then random lifts.

    Random lifts are overdispersed in the delocalized regime but still
    land in plausible basins when the law freezes; adversarial starts
    (such as the zero field against near-integer shifts) would measure
    basin trapping rather than the conditional law.
    """
    inits: list[np.ndarray] = []
    m0, _ = ivgff.ground_state(lattice, av)
    inits.append(m0)
    for _ in range(n_chains - 1):
        inits.append(ivgff.random_lift_init(lattice, av, beta, rng))
    return inits[:n_chains]


def reconstruct(
    phases: PhaseField,
    config: SamplerConfig = SamplerConfig(),
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    f: np.ndarray | None = None,
) -> ReconResult:
    """Estimate ``F_T`` at the observed phases: ``(2 pi / T)(a + E[m | a])``.

    Multiple chains with diverse starts are averaged after burn-in; the
    result is flagged non-converged (never discarded) when the split
    scale-reduction diagnostic of ``phi(center)`` or ``<phi, f>`` exceeds
    the configured threshold.
    """
    lattice = phases.lattice
    T = phases.T
    beta = beta_of(T)
    if rng is None:
        rng = np.random.default_rng(seed)
    if f is None:
        f = np.zeros(lattice.num_vertices)
        f[lattice.center] = 1.0
    scale = TWO_PI / T

    inits = _chain_inits(lattice, phases.a, beta, config.n_chains, rng)
    streams = rng.spawn(config.n_chains)
    mean_acc = np.zeros(lattice.num_vertices)
    sq_acc = np.zeros(lattice.num_vertices)
    trace_center = np.empty((config.n_chains, config.n_samples))
    trace_f = np.empty((config.n_chains, config.n_samples))
    for c in range(config.n_chains):
        chain = ivgff.IvGibbsChain(lattice, beta, phases.a, init=inits[c], rng=streams[c])
        chain.sweep(config.burn_in)
        for s in range(config.n_samples):
            chain.sweep(config.thinning)
            phi = scale * chain.shifted_field()
            mean_acc += phi
            sq_acc += phi**2
            trace_center[c, s] = phi[lattice.center]
            trace_f[c, s] = phi @ f
    total = config.n_chains * config.n_samples
    mean_field = mean_acc / total
    per_site_var = np.maximum(sq_acc / total - mean_field**2, 0.0)
    rhat_center = split_r_hat(trace_center)
    rhat_f = split_r_hat(trace_f)
    converged = max(rhat_center, rhat_f) <= config.rhat_threshold
    diagnostics = {
        "rhat_center": rhat_center,
        "rhat_functional": rhat_f,
        "n_kept": total,
    }
    meta = {
        "T": T,
        "rows": lattice.rows,
        "cols": lattice.cols,
        "n": lattice.n,
        "bc": lattice.bc,
        "seed": seed,
        "sweeps": config.burn_in + config.n_samples * config.thinning,
    }
    return ReconResult(
        mean_field=mean_field,
        per_site_var=per_site_var,
        diagnostics=diagnostics,
        meta=meta,
        converged=converged,
    )


def recentred(lattice: Lattice, f: np.ndarray) -> np.ndarray:
    """``f`` minus its lattice average (free-boundary test functions must
    have zero mean for ``<phi, f>`` to be shift-invariant)."""
    f = np.asarray(f, dtype=float)
    return f - f.mean()


def conditional_variance(
    lattice: Lattice,
    f: np.ndarray,
    T: float,
    n_disorder: int = 64,
    n_pairs: int = 4,
    pair_config: ivgff.PairConfig = ivgff.PairConfig(),
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> VarianceEstimate:
    """``(1/2) E[<phi_1 - phi_2, f>^2]`` by nested Monte Carlo.

    Outer loop: fresh field draws, observed at period ``T``.  Inner loop:
    conditionally independent chain pairs at the observed phases.  On free
    lattices ``f`` is recentred to zero mean first, which also cancels the
    global fiber shift between the two lifts.  Pairs whose health flag is
    down are excluded from the average and counted.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (lattice.num_vertices,):
        raise ValueError("f must have one entry per vertex")
    if lattice.bc == "free":
        f = recentred(lattice, f)
    if n_disorder < 2:
        raise ValueError("need at least 2 disorder draws")
    beta = beta_of(T)
    scale = TWO_PI / T
    if rng is None:
        rng = np.random.default_rng(seed)
    streams = rng.spawn(n_disorder)
    sampler = GffSampler(lattice)
    disorder_means = []
    excluded = 0
    for i in range(n_disorder):
        stream = streams[i]
        phi = sampler.sample(stream)
        a = observe(lattice, phi, T)
        vals = []
        for _ in range(n_pairs):
            m1, m2, ok = ivgff.sample_pair_info(lattice, a.a, beta, stream, pair_config)
            if not ok:
                excluded += 1
                continue
            diff = scale * (m1 - m2).astype(float)
            vals.append(0.5 * float(diff @ f) ** 2)
        if vals:
            disorder_means.append(np.mean(vals))
    if not disorder_means:
        raise RuntimeError("all chain pairs were excluded")
    u = np.asarray(disorder_means)
    value = float(u.mean())
    se = float(u.std(ddof=1) / np.sqrt(u.size)) if u.size > 1 else float("inf")
    return VarianceEstimate(
        value=value,
        std_error=se,
        n_disorder=u.size,
        n_chain_pairs=n_pairs,
        n_excluded=excluded,
    )


@dataclass(frozen=True)
class RayTable:
    """Two-point difference statistics along a lattice ray.

    ``values[j]`` estimates ``E[(phi_1-phi_2)(x) (phi_1-phi_2)(y_j)]`` for
    the ``j``-th vertex on the ray (the first entry is ``y = x`` itself).
    """

    vertices: np.ndarray
    distances: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray


def _ray_from(lattice: Lattice, x: int) -> np.ndarray:
    """Vertices from ``x`` rightward along its row, boundary excluded."""
    r, c = lattice.row[x], lattice.col[x]
    out = []
    for cc in range(c, lattice.cols):
        v = lattice.index(r, cc)
        if lattice.boundary_mask[v]:
            break
        out.append(v)
    return np.asarray(out, dtype=np.int64)


def one_point_stats(
    lattice: Lattice,
    T: float,
    x: int,
    n_disorder: int = 64,
    n_pairs: int = 4,
    pair_config: ivgff.PairConfig = ivgff.PairConfig(),
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> tuple[VarianceEstimate, RayTable]:
    """Pointwise difference variance at ``x`` and its two-point profile.

    Returns the estimate of ``E[(phi_1-phi_2)^2(x)]`` (no 1/2 factor) and
    a table of ``E[(phi_1-phi_2)(x)(phi_1-phi_2)(y)]`` for ``y`` on the
    rightward ray from ``x``.
    """
    if not lattice.interior_mask[x]:
        raise ValueError("x must be an interior vertex")
    beta = beta_of(T)
    scale = TWO_PI / T
    if rng is None:
        rng = np.random.default_rng(seed)
    ray = _ray_from(lattice, x)
    streams = rng.spawn(n_disorder)
    sampler = GffSampler(lattice)
    per_disorder = []  # rows: mean over pairs of d(x)*d(y) for each ray y
    excluded = 0
    for i in range(n_disorder):
        stream = streams[i]
        phi = sampler.sample(stream)
        a = observe(lattice, phi, T)
        rows = []
        for _ in range(n_pairs):
            m1, m2, ok = ivgff.sample_pair_info(lattice, a.a, beta, stream, pair_config)
            if not ok:
                excluded += 1
                continue
            diff = scale * (m1 - m2).astype(float)
            rows.append(diff[x] * diff[ray])
        if rows:
            per_disorder.append(np.mean(rows, axis=0))
    if not per_disorder:
        raise RuntimeError("all chain pairs were excluded")
    U = np.asarray(per_disorder)
    values = U.mean(axis=0)
    ses = U.std(axis=0, ddof=1) / np.sqrt(U.shape[0]) if U.shape[0] > 1 else np.full(ray.size, np.inf)
    var_diff = VarianceEstimate(
        value=float(values[0]),
        std_error=float(ses[0]),
        n_disorder=U.shape[0],
        n_chain_pairs=n_pairs,
        n_excluded=excluded,
    )
    dist = np.abs(lattice.col[ray] - lattice.col[x]).astype(float) * lattice.spacing
    table = RayTable(vertices=ray, distances=dist, values=values, std_errors=ses)
    return var_diff, table


@dataclass(frozen=True)
class SweepConfig:
    """Budget for one cell of the transition sweep."""

    n_disorder: int = 64
    n_pairs: int = 4
    pair_config: ivgff.PairConfig = ivgff.PairConfig()


def transition_sweep(
    Ts,
    ns,
    config: SweepConfig = SweepConfig(),
    bc: str = "dirichlet",
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> list[dict]:
    """Conditional variance of ``phi(0)`` against the Green function.

    For every ``(T, n)`` cell: estimate ``(1/2) E[(phi_1-phi_2)^2(0)]``
    (the conditional variance of ``phi(0)``) and report its ratio to
    ``G_n(0, 0)``.  Small ratio = localized (reconstructible); ratio near
    one = delocalized.
    """
    from .lattice import build_lattice

    Ts = list(Ts)
    ns = list(ns)
    if not Ts or not ns:
        raise ValueError("nonempty T and n grids required")
    if rng is None:
        rng = np.random.default_rng(seed)
    rows = []
    for T in Ts:
        for n in ns:
            lattice = build_lattice(n, bc=bc)
            f = np.zeros(lattice.num_vertices)
            f[lattice.center] = 1.0
            est = conditional_variance(
                lattice,
                f,
                T,
                n_disorder=config.n_disorder,
                n_pairs=config.n_pairs,
                pair_config=config.pair_config,
                rng=rng.spawn(1)[0],
            )
            green = lattice.green(lattice.center, lattice.center)
            rows.append(
                {
                    "T": float(T),
                    "n": int(n),
                    "value": est.value,
                    "std_error": est.std_error,
                    "green": green,
                    "ratio": est.value / green,
                    "ratio_se": est.std_error / green,
                    "n_disorder": est.n_disorder,
                    "n_excluded": est.n_excluded,
                }
            )
    return rows
