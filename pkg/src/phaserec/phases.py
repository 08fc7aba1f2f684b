"""Phase observation of a vertex field and integer lifts back.

A field ``phi`` observed at temperature ``T`` keeps only ``phi`` modulo
``2*pi/T``, stored as the shift vector ``a = (T/2pi) phi mod 1`` with one
entry per vertex in ``[0, 1)``.  Conversely every pair of an integer field
``m`` and a shift vector lifts to the representative ``(2pi/T)(m + a)``.

The matching inverse temperature is ``beta_of(T) = (2pi)^2 / T^2``: the
conditional law of a GFF given its phases is ``(2pi/T)`` times an
integer-shifted field at inverse temperature ``beta_of(T)`` (see
:mod:`phaserec.ivgff`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice

TWO_PI = 2.0 * np.pi

# shifts this close to 1.0 are wrapped down to 0.0 to keep a in [0, 1)
_WRAP_TOL = 1e-12


def beta_of(T: float) -> float:
    """Inverse temperature ``(2pi)^2 / T^2`` matching observation period ``T``."""
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    return (TWO_PI / T) ** 2


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Observed phases: shift vector ``a`` in ``[0,1)`` per vertex.

    ``a`` vanishes on the lattice boundary (the full frame for Dirichlet
    domains, the root vertex for free ones).
    """

    lattice: Lattice
    T: float
    a: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        a = np.asarray(self.a, dtype=float)
        if a.shape != (self.lattice.num_vertices,):
            raise ValueError("a must have one entry per vertex")
        if a.min() < 0.0 or a.max() >= 1.0:
            raise ValueError("shift entries must lie in [0, 1)")
        if np.any(a[self.lattice.boundary] != 0.0):
            raise ValueError("shift must vanish on the boundary")
        object.__setattr__(self, "a", a)

    @property
    def beta(self) -> float:
        """``beta_of(T)`` for this observation."""
        return beta_of(self.T)


def observe(lattice: Lattice, phi: np.ndarray, T: float) -> PhaseField:
    """Observe ``phi`` at temperature ``T``: ``a = (T/2pi) phi mod 1``.

    Reduction is floor-based; values within ``1e-12`` of 1.0 wrap to 0.0 so
    the result always lies in ``[0, 1)``.  Boundary entries are exactly 0.
    """
    phi = np.asarray(phi, dtype=float)
    x = (T / TWO_PI) * phi
    a = x - np.floor(x)
    a[a >= 1.0 - _WRAP_TOL] = 0.0
    a[lattice.boundary] = 0.0
    return PhaseField(lattice=lattice, T=T, a=a)


def lift(m: np.ndarray, phases: PhaseField) -> np.ndarray:
    """Representative field ``(2pi/T)(m + a)`` for an integer field ``m``.

    ``m`` must vanish on the boundary so the lift does too.
    """
    lat = phases.lattice
    m = np.asarray(m)
    if m.shape != (lat.num_vertices,):
        raise ValueError("m must have one entry per vertex of the phase lattice")
    if not np.issubdtype(m.dtype, np.integer):
        raise ValueError("m must be an integer field")
    if np.any(m[lat.boundary] != 0):
        raise ValueError("m must vanish on the boundary")
    return (TWO_PI / phases.T) * (m + phases.a)
