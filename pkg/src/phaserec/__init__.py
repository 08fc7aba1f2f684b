"""Reconstruction of a lattice Gaussian free field from its phases.

The package simulates the discrete Gaussian free field (GFF) on square
lattice domains, reduces it modulo a phase period ``2*pi/T``, and studies
how much of the field the phases determine: exact conditional laws on tiny
lattices, Gibbs samplers for the integer-valued conditional field, coupled
pairs and their disagreement clusters, theta-function identities for the
one-dimensional conditional moments, a sine-Gordon relative, and level-line
geometry of the conditional mean.

Modules
-------
lattice      square / rectangular grids, discrete calculus, Green function
gff          exact Gaussian free field samplers
phases       phase observation and lifts
ivgff        integer-valued conditional field: energy, Gibbs, enumeration
recon        conditional means/variances and coupled-pair estimates
clusters     agreement clusters of coupled pairs and their statistics
theta        Jacobi/Riemann theta identities and the information bound
sinegordon   sine-Gordon model with phase disorder
levellines   level-line tracing on the dual lattice
experiments  config, seeds, parallel driver, CSV/manifest output, CLI
"""

from .lattice import Lattice, build_grid, build_lattice

__all__ = ["Lattice", "build_grid", "build_lattice"]

__version__ = "0.1.0"
