"""Exact samplers for the discrete Gaussian free field.

The zero-boundary Gaussian free field (GFF) on a lattice has density
proportional to ``exp(-<grad phi, grad phi>_E / 2)`` over fields vanishing
on the boundary; its covariance is the lattice Green function.

Sampling is exact, not MCMC: draw one standard normal ``W(e)`` per
undirected edge and solve

    phi = lap^{-1} (div W)      (zero boundary values).

Writing ``D`` for the sparse gradient matrix, the interior part is
``phi_I = (D^T D)_II^{-1} (D^T W)_I``, whose covariance is exactly
``(D^T D)_II^{-1} = G``.  The same draw therefore serves both the plain
sampler and the white-noise decomposition ``W = grad phi + zeta`` with
``zeta`` orthogonal to gradients.
"""

from __future__ import annotations

import numpy as np

from .lattice import Lattice


class GffSampler:
    """Exact GFF sampler bound to a lattice.

    The lattice's cached interior factorization is reused for every draw.
    A sampler is immutable and shareable; passing an explicit generator to
    the sampling methods keeps parallel use schedule-independent.

    Parameters
    ----------
    lattice:
        Domain to sample on.
    seed:
        Seed for the sampler's own generator, used when a method is called
        without an explicit ``rng``.
    """

    def __init__(self, lattice: Lattice, seed: int | None = None) -> None:
        self.lattice = lattice
        self.seed = seed
        self._rng = np.random.default_rng(seed)
        # warm the factorization so samplers are cheap to share afterwards
        lattice._interior_solver

    def _generator(self, rng: np.random.Generator | None) -> np.random.Generator:
        return self._rng if rng is None else rng

    def sample(self, rng: np.random.Generator | None = None) -> np.ndarray:
        """One exact draw as a full vertex field (zero on the boundary)."""
        return self.sample_with_noise(rng)[1]

    def sample_with_noise(
        self, rng: np.random.Generator | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Edge white noise ``W`` and the field ``phi = lap^{-1} div W``."""
        lat = self.lattice
        rng = self._generator(rng)
        W = rng.standard_normal(lat.num_edges)
        phi = np.zeros(lat.num_vertices)
        rhs = (lat.gradient_matrix.T @ W)[lat.interior]
        phi[lat.interior] = lat.solve_interior(rhs)
        return W, phi

    def sample_batch(
        self, size: int, rng: np.random.Generator | None = None
    ) -> np.ndarray:
        """``(size, num_vertices)`` array of independent draws."""
        lat = self.lattice
        rng = self._generator(rng)
        W = rng.standard_normal((lat.num_edges, size))
        rhs = (lat.gradient_matrix.T @ W)[lat.interior]
        phi = np.zeros((size, lat.num_vertices))
        phi[:, lat.interior] = lat.solve_interior(rhs).T
        return phi

    def sample_markov_split(
        self, B: np.ndarray, rng: np.random.Generator | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Split one draw into its harmonic part on ``B`` and the remainder.

        ``B`` is a set of interior vertex indices.  Returns ``(phi_B,
        phi_sup_B)`` where ``phi_B`` is the harmonic extension of the draw's
        values on ``B`` and the boundary, and ``phi_sup_B`` is the remainder,
        which vanishes on ``B`` and the boundary.  The two parts are
        independent and sum to a GFF draw.
        """
        lat = self.lattice
        B = np.asarray(B, dtype=np.int64).ravel()
        if B.size and lat.boundary_mask[B].any():
            raise ValueError("B must not intersect the boundary")
        phi = self.sample(rng)
        fixed = lat.boundary_mask.copy()
        fixed[B] = True
        phi_B = lat.harmonic_extension(phi, fixed)
        return phi_B, phi - phi_B


def sample_via_white_noise(
    lattice: Lattice, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw edge white noise ``W`` and return ``(W, lap^{-1} div W)``."""
    return GffSampler(lattice).sample_with_noise(rng)
