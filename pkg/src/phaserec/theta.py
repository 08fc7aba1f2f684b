"""Theta functions and the identities behind one-dimensional conditioning.

Contents:

* Jacobi and Riemann theta evaluation with tail-bounded truncation and
  their modular transformation checks.
* Conditional moments of a Gaussian given its value modulo a period
  ("fiber" means): a primal lattice sum and a dual Fourier sum that agree
  identically; the dual form stays numerically accurate when the primal
  sum cancels catastrophically.
* ``sigma_T``: the per-edge variance retention of phase observation,
  ``beta_T * E[E[Z | Z mod 1]^2]`` with ``Z ~ N(0, 1/beta_T)``, by
  quadrature.
* A Monte Carlo information-bound check comparing the conditional second
  moment of a linear functional with ``sigma_T * <f, (-lap)^{-1} f>``.
* A brute-force verification of the modular-invariance identity
  ``E[<phi, f>] = -<sigma, grad_a log Z>`` on tiny lattices via exact
  enumeration and Richardson-extrapolated finite differences.

All truncations keep relative tails below ``exp(-40) ~ 4e-18``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .lattice import Lattice
from .phases import TWO_PI, beta_of
from . import ivgff

_TAIL_LOG = 40.0
_MAX_THETA_TERMS = 20_000_000


# ---------------------------------------------------------------------------
# theta functions


def jacobi_theta(z: complex, tau: complex) -> complex:
    """``sum_n exp(i pi n^2 tau + 2 i pi n z)`` with auto-truncation."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("tau must have positive imaginary part")
    z = complex(z)
    # |term| = exp(-pi n^2 Im tau - 2 pi n Im z): centre the window on the
    # maximising n and extend until the Gaussian tail is below exp(-40)
    center = -z.imag / tau.imag
    radius = np.sqrt(_TAIL_LOG / (np.pi * tau.imag)) + 2.0
    lo = int(np.floor(center - radius))
    hi = int(np.ceil(center + radius))
    n = np.arange(lo, hi + 1)
    return complex(np.sum(np.exp(1j * np.pi * n**2 * tau + 2j * np.pi * n * z)))


def riemann_theta(z: np.ndarray, Omega: np.ndarray) -> complex:
    """``sum_{m in Z^g} exp(i pi m.Omega.m + 2 i pi m.z)`` for small ``g``."""
    Omega = np.asarray(Omega, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    g = z.size
    if Omega.shape != (g, g):
        raise ValueError("Omega must be g x g for z of length g")
    if not np.allclose(Omega, Omega.T, atol=1e-12):
        raise ValueError("Omega must be symmetric")
    Y = Omega.imag
    eig = np.linalg.eigvalsh(Y)
    if eig.min() <= 0:
        raise ValueError("Im(Omega) must be positive definite")
    center = -np.linalg.solve(Y, z.imag)
    radius = int(np.ceil(np.sqrt(_TAIL_LOG / (np.pi * eig.min())))) + 2
    if (2 * radius + 1) ** g > _MAX_THETA_TERMS:
        raise ValueError("truncation window too large")
    axes = [np.arange(int(np.floor(c)) - radius, int(np.ceil(c)) + radius + 1) for c in center]
    grids = np.meshgrid(*axes, indexing="ij")
    M = np.stack([grid.ravel() for grid in grids], axis=1).astype(float)
    quad_form = np.einsum("ij,jk,ik->i", M, Omega, M)
    expo = 1j * np.pi * quad_form + 2j * np.pi * (M @ z)
    return complex(np.sum(np.exp(expo)))


def jacobi_modular_gap(beta: float, a: float) -> float:
    """Relative gap in the modular identity at ``z = i beta a, tau = 2 pi i beta``.

    The identity: ``theta(z/tau | -1/tau) = alpha * theta(z | tau)`` with
    ``alpha = sqrt(-i tau) * exp(pi i z^2 / tau)``.
    """
    z = 1j * beta * a
    tau = 2j * np.pi * beta
    lhs = jacobi_theta(z / tau, -1.0 / tau)
    alpha = np.sqrt(-1j * tau) * np.exp(1j * np.pi * z**2 / tau)
    rhs = alpha * jacobi_theta(z, tau)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def riemann_modular_gap(z: np.ndarray, Omega: np.ndarray) -> float:
    """Relative gap in the multidimensional modular identity.

    ``theta(Omega^{-1} z | -Omega^{-1}) = sqrt(det(-i Omega)) *
    exp(pi i z.Omega^{-1}.z) * theta(z | Omega)``.
    """
    Omega = np.asarray(Omega, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    Oinv = np.linalg.inv(Omega)
    lhs = riemann_theta(Oinv @ z, -Oinv)
    factor = np.sqrt(np.linalg.det(-1j * Omega)) * np.exp(1j * np.pi * (z @ (Oinv @ z)))
    rhs = factor * riemann_theta(z, Omega)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


# ---------------------------------------------------------------------------
# fiber (wrapped Gaussian) conditional moments


def fiber_conditional_mean(beta: float, a: float, period: float = TWO_PI) -> float:
    """Mean of ``X ~ exp(-beta x^2 / 2)`` restricted to ``period*Z + a``.

    Direct lattice sum; accurate unless the result is exponentially smaller
    than the summands (use the dual form there).
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    # shift by whole periods to the minimal representative: same fiber,
    # same mean, smallest window; the centered fiber has mean exactly 0
    r = a - period * np.round(a / period)
    if r == 0.0:
        return 0.0
    R = abs(r) + period + np.sqrt(2.0 * _TAIL_LOG / beta)
    lo = int(np.floor((-R - r) / period))
    hi = int(np.ceil((R - r) / period))
    x = period * np.arange(lo, hi + 1) + r
    expo = -0.5 * beta * x**2
    w = np.exp(expo - expo.max())
    return float(np.sum(w * x) / np.sum(w))


def cond_mean_primal(beta: float, a: float) -> float:
    """Primal sum: mean over the fiber ``2 pi Z + a`` with weight
    ``exp(-beta x^2 / 2)``."""
    return fiber_conditional_mean(beta, a, TWO_PI)


def cond_mean_dual(beta: float, a: float) -> float:
    """Dual (Fourier) form of :func:`cond_mean_primal`:

    ``(1/beta) * sum_q q e^{-q^2/(2 beta)} sin(q a) /
    sum_q e^{-q^2/(2 beta)} cos(q a)``, sums over all integers ``q``.

    Both sums cancel down to ``~exp(-beta a^2 / 2)`` built from order-one
    terms, so for large ``beta`` the evaluation needs more precision than
    a double carries; the working precision is raised accordingly
    (``mpmath``) and the result rounded back to a float.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    import mpmath as mp

    # both series are 2 pi periodic in a; reduce to (-pi, pi] to bound the
    # cancellation, whose depth is exp(-beta r^2 / 2)
    r = a - TWO_PI * np.round(a / TWO_PI)
    cancel_log10 = 0.5 * beta * r * r / np.log(10.0)
    Q = int(np.ceil(np.sqrt(beta * beta * r * r + 2.0 * beta * _TAIL_LOG))) + 2
    with mp.workdps(25 + int(np.ceil(cancel_log10))):
        rm = mp.mpf(r)
        bm = mp.mpf(beta)
        num_terms = []
        den_terms = [mp.mpf(1)]
        for q in range(1, Q + 1):
            w = mp.exp(-(mp.mpf(q) ** 2) / (2 * bm))
            num_terms.append(2 * q * w * mp.sin(q * rm))
            den_terms.append(2 * w * mp.cos(q * rm))
        val = mp.fsum(num_terms) / (bm * mp.fsum(den_terms))
        return float(val)


def fiber_conditional_mean_dual(beta: float, a: float, period: float) -> float:
    """Dual-form fiber mean for an arbitrary period (rescaled ``cond_mean_dual``)."""
    scale = period / TWO_PI
    return scale * cond_mean_dual(beta * scale**2, a / scale)


def wrapped_density(beta: float, a: float, period: float = 1.0) -> float:
    """Density of ``X mod period`` at ``a`` for ``X ~ N(0, 1/beta)``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    R = abs(a) + period + np.sqrt(2.0 * _TAIL_LOG / beta)
    lo = int(np.floor((-R - a) / period))
    hi = int(np.ceil((R - a) / period))
    x = period * np.arange(lo, hi + 1) + a
    return float(np.sqrt(beta / TWO_PI) * np.sum(np.exp(-0.5 * beta * x**2)))


# ---------------------------------------------------------------------------
# sigma(T)


def sigma_T(T: float, n_nodes: int | None = None) -> float:
    """``beta_T * E[E[Z | Z mod 1]^2]`` with ``Z ~ N(0, 1/beta_T)``.

    Uses the dual-form conditional mean (the primal form loses all digits
    once ``T`` exceeds about 4).  ``n_nodes`` switches from adaptive
    quadrature (relative tolerance 1e-12) to a fixed Gauss-Legendre rule,
    used by the node-doubling invariance test.
    """
    beta = beta_of(T)

    def integrand(a: float) -> float:
        mu = fiber_conditional_mean_dual(beta, a, 1.0)
        return wrapped_density(beta, a, 1.0) * mu * mu

    if n_nodes is None:
        val, _ = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    else:
        x, w = np.polynomial.legendre.leggauss(int(n_nodes))
        t = 0.5 * (x + 1.0)
        val = 0.5 * float(np.sum(w * np.array([integrand(ti) for ti in t])))
    return beta * val


def sigma_asymptote(T: float) -> float:
    """Large-``T`` asymptote ``2 T^2 exp(-T^2)`` of :func:`sigma_T`."""
    return 2.0 * T**2 * np.exp(-(T**2))


# ---------------------------------------------------------------------------
# information bound


@dataclass(frozen=True)
class InfoBoundResult:
    """Monte Carlo comparison of phase information against its predicted size.

    ``lhs``: estimate of ``E[E[<phi, f> | phases of W]^2]``; ``rhs``:
    ``sigma_T * <f, (-lap)^{-1} f>``; ``jensen``: the unconditional second
    moment ``<f, (-lap)^{-1} f>`` which must dominate ``lhs``.
    """

    lhs: float
    lhs_se: float
    rhs: float
    ratio: float
    jensen: float


def information_bound_check(
    lattice: Lattice,
    T: float,
    f: np.ndarray,
    n_draws: int,
    rng: np.random.Generator,
    grid: int = 4096,
) -> InfoBoundResult:
    """Estimate the conditional second moment of ``<phi, f>`` given edge phases.

    Writing ``phi = lap^{-1} div W`` for edge white noise ``W``, the
    functional ``<phi, f>`` equals ``<W, grad s>`` with
    ``s = (-lap)^{-1} f``, so conditioning on every edge's value modulo
    ``2 pi / T`` factorizes into per-edge conditional means, evaluated here
    through a dense interpolation table.
    """
    f = np.asarray(f, dtype=float)
    s = lattice.solve_poisson(f)
    c = lattice.gradient(s)
    period = TWO_PI / T
    r_grid = np.linspace(0.0, period, grid, endpoint=False)
    m_grid = np.array([fiber_conditional_mean(1.0, r, period) for r in r_grid])
    # the fiber mean depends only on the residue class, so close the table
    # periodically: the node at r = period repeats the one at r = 0
    r_ext = np.append(r_grid, period)
    m_ext = np.append(m_grid, m_grid[0])
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = max(1, min(n_draws, 5000))
    while done < n_draws:
        k = min(chunk, n_draws - done)
        W = rng.standard_normal((k, lattice.num_edges))
        R = np.mod(W, period)
        M = np.interp(R, r_ext, m_ext)
        vals = M @ c
        total += float(np.sum(vals**2))
        total_sq += float(np.sum(vals**4))
        done += k
    lhs = total / n_draws
    var = max(total_sq / n_draws - lhs**2, 0.0)
    lhs_se = float(np.sqrt(var / n_draws))
    jensen = float(f @ s)
    rhs = sigma_T(T) * jensen
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    return InfoBoundResult(lhs=lhs, lhs_se=lhs_se, rhs=rhs, ratio=ratio, jensen=jensen)


# ---------------------------------------------------------------------------
# modular invariance on tiny lattices


@dataclass(frozen=True)
class ModularCheckResult:
    """Both sides of the enumerated modular-invariance identity."""

    lhs: float
    rhs: float
    gap: float


def modular_invariance_check(
    lattice: Lattice,
    beta: float,
    a,
    f: np.ndarray,
    K: int = 8,
    h: float = 1e-4,
) -> ModularCheckResult:
    """Verify ``E[<phi, f>] = -<sigma, grad_a log Z>`` by enumeration.

    Convention: ``phi = 2 pi (m + a)`` on fibers spaced ``2 pi``, with the
    phase field ``a`` in ``[0, 1)`` units, so the integer model runs at
    inverse temperature ``(2 pi)^2 beta``; ``sigma = (1/beta)(-lap)^{-1} f``
    and the gradient of ``log Z`` with respect to the angle ``2 pi a`` is
    taken by Richardson-extrapolated central differences of step ``h`` in
    the ``a`` coordinate.
    """
    if lattice.num_interior > 4:
        raise ValueError("instance too large: at most 4 interior vertices")
    if K > 8:
        raise ValueError("instance too large: window at most 8")
    av = ivgff.shift_vector(lattice, a)
    f = np.asarray(f, dtype=float)
    beta_unit = (TWO_PI**2) * beta

    table = ivgff.enumerate_exact(lattice, av, beta_unit, K)
    shifted = table.support + av[lattice.interior]
    lhs = TWO_PI * table.expect(shifted @ f[lattice.interior])

    sigma = lattice.solve_poisson(f) / beta

    def logZ(vec: np.ndarray) -> float:
        return ivgff.log_partition(lattice, vec, beta_unit, K)

    grad_angle = np.zeros(lattice.num_interior)
    for pos, v in enumerate(lattice.interior):
        def diff(step: float) -> float:
            ap = av.copy()
            am = av.copy()
            ap[v] += step
            am[v] -= step
            return (logZ(ap) - logZ(am)) / (2.0 * step)

        d = (4.0 * diff(h / 2.0) - diff(h)) / 3.0
        grad_angle[pos] = d / TWO_PI  # d/d(2 pi a) = (1/2pi) d/da

    rhs = -float(sigma[lattice.interior] @ grad_angle)
    return ModularCheckResult(lhs=lhs, rhs=rhs, gap=abs(lhs - rhs))
