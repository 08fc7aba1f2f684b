"""Interface tracing on the dual lattice.

A level line separates the vertices where a field ``S`` is negative from
those where it is non-negative (exact zeros count as positive, a
deterministic tie rule that is invisible for generic continuous fields).
The traced object is a walk on grid faces: each step crosses one primal
edge, and every crossed edge must have a negative-class vertex on the
path's left and a positive-class vertex on its right.

On the standard square domain with side parameter ``n``, paths are
anchored at two boundary edges: they enter through the bottom edge just
right of the centre column and leave through the top edge just left of
it.  These are exactly the two sign-changing boundary edges of the
antisymmetric harmonic comparison field built by
:func:`harmonic_boundary` (``+lam`` on the right half of the frame and
the top-centre vertex, ``-lam`` on the left half and the bottom-centre
vertex), so for any field with that boundary data the trace provably
enters and exits at the anchors.

When two continuations are admissible at a face (a saddle), the path
turns left relative to its travel direction; this traces the boundary of
the negative cluster attached to the entry edge and never crosses a dual
edge twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .lattice import Lattice
from .phases import PhaseField
from .recon import ReconResult, SamplerConfig, reconstruct

#: comparison-field amplitude sqrt(pi / 8)
LAMBDA = float(np.sqrt(np.pi / 8.0))

__all__ = [
    "LAMBDA",
    "DualPath",
    "TraceError",
    "harmonic_boundary",
    "trace_level_line",
    "trace_phase_level_line",
    "check_sign_rule",
    "hausdorff",
    "reconstructed_level_line",
]


class TraceError(RuntimeError):
    """Raised when a level line cannot be continued or exits off-anchor."""


@dataclass(frozen=True, eq=False)
class DualPath:
    """An anchored dual-lattice walk.

    ``points`` holds the polyline in grid coordinates ``(row, col)``:
    the entry edge midpoint, the visited face centres (at half-integer
    coordinates), and the exit edge midpoint.  ``crossed`` lists the
    primal edges the walk crossed as ``(left, right)`` vertex indices
    relative to the direction of motion.
    """

    lattice: Lattice
    points: np.ndarray = field(repr=False)
    faces: np.ndarray = field(repr=False)
    crossed: np.ndarray = field(repr=False)
    start_col: int
    end_col: int

    def __len__(self) -> int:
        return len(self.points)

    @property
    def unit_square_points(self) -> np.ndarray:
        """Polyline as ``(x, y)`` in the centred unit square ``[-1, 1]^2``."""
        n = self.lattice.n
        if n is None:
            raise ValueError("square-domain coordinates need a side parameter")
        rc = self.points
        return np.column_stack([(rc[:, 1] - n) / n, (rc[:, 0] - n) / n])


def harmonic_boundary(lattice: Lattice, lam: float = LAMBDA) -> np.ndarray:
    """Harmonic field with antisymmetric two-valued boundary data.

    Boundary vertices take ``+lam`` on the right half (``x > 0``) plus
    the top-centre vertex, and ``-lam`` on the left half plus the
    bottom-centre vertex, so the only sign-changing boundary edges are
    the two trace anchors.  The interior is the harmonic extension.
    """
    if lattice.bc != "dirichlet" or lattice.n is None:
        raise ValueError("comparison field needs the square Dirichlet domain")
    n = lattice.n
    g = np.zeros(lattice.num_vertices)
    x = lattice.col.astype(np.int64) - n
    sign = np.where(x > 0, 1.0, -1.0)
    centre = x == 0
    sign[centre & (lattice.row == 2 * n)] = 1.0
    sign[centre & (lattice.row == 0)] = -1.0
    g[lattice.boundary] = lam * sign[lattice.boundary]
    if lam == 0.0:
        return g
    return lattice.harmonic_extension(g, lattice.boundary_mask)


# Crossed primal edge (left, right) for a move in each compass direction
# out of face (fr, fc), and the face displacement of the move.
_STEP = {"N": (1, 0), "E": (0, 1), "S": (-1, 0), "W": (0, -1)}
_LEFT_TURN = {"N": "W", "W": "S", "S": "E", "E": "N"}
_RIGHT_TURN = {v: k for k, v in _LEFT_TURN.items()}


def _crossing(fr: int, fc: int, d: str) -> tuple[tuple[int, int], tuple[int, int]]:
    if d == "N":
        return (fr + 1, fc), (fr + 1, fc + 1)
    if d == "S":
        return (fr, fc + 1), (fr, fc)
    if d == "E":
        return (fr + 1, fc + 1), (fr, fc + 1)
    return (fr, fc), (fr + 1, fc)


def trace_level_line(
    lattice: Lattice,
    S: np.ndarray,
    start_col: int | None = None,
    end_col: int | None = None,
) -> DualPath:
    """Trace the level line of ``S`` between the two anchor edges.

    The walk enters moving north through the bottom edge between columns
    ``(start_col, start_col + 1)`` and must leave through the top edge
    between ``(end_col, end_col + 1)``; defaults are the standard
    anchors ``(n, n + 1)`` and ``(n - 1, n)``.  Raises
    :class:`TraceError` if no continuation is admissible, if the walk
    exits through any other boundary edge, or if the step budget
    ``4 * rows * cols`` is exceeded.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (lattice.num_vertices,):
        raise ValueError("S must have one entry per vertex")
    R, C = lattice.rows, lattice.cols
    if start_col is None or end_col is None:
        if lattice.n is None:
            raise ValueError("default anchors need a side parameter")
        start_col = lattice.n if start_col is None else start_col
        end_col = lattice.n - 1 if end_col is None else end_col
    if not (0 <= start_col < C - 1 and 0 <= end_col < C - 1):
        raise ValueError("anchor columns out of range")

    neg = S < 0.0  # exact zeros count as positive

    def admissible(fr: int, fc: int, d: str) -> tuple[bool, int, int]:
        (lr, lc), (rr, rc) = _crossing(fr, fc, d)
        left = lr * C + lc
        right = rr * C + rc
        return bool(neg[left] and not neg[right]), left, right

    ok, left, right = admissible(-1, start_col, "N")
    if not ok:
        raise TraceError(
            f"no admissible continuation at dual vertex (-0.5, {start_col + 0.5})"
        )
    face = (0, start_col)
    d = "N"
    points = [(0.0, start_col + 0.5), (0.5, start_col + 0.5)]
    faces = [face]
    crossed = [(left, right)]
    budget = 4 * R * C
    while True:
        if len(crossed) > budget:
            raise TraceError("step budget exceeded; field has no anchored line")
        fr, fc = face
        for nd in (_LEFT_TURN[d], d, _RIGHT_TURN[d]):
            ok, left, right = admissible(fr, fc, nd)
            if ok:
                break
        else:
            raise TraceError(
                f"no admissible continuation at dual vertex ({fr + 0.5}, {fc + 0.5})"
            )
        dr, dc = _STEP[nd]
        nf = (fr + dr, fc + dc)
        crossed.append((left, right))
        if not (0 <= nf[0] <= R - 2 and 0 <= nf[1] <= C - 2):
            if nd == "N" and nf[0] == R - 1 and fc == end_col:
                points.append((float(R - 1), end_col + 0.5))
                return DualPath(
                    lattice=lattice,
                    points=np.array(points),
                    faces=np.array(faces, dtype=np.int64),
                    crossed=np.array(crossed, dtype=np.int64),
                    start_col=int(start_col),
                    end_col=int(end_col),
                )
            raise TraceError(
                f"path exited the domain off-anchor at dual vertex "
                f"({fr + 0.5}, {fc + 0.5}) heading {nd}"
            )
        face = nf
        d = nd
        points.append((face[0] + 0.5, face[1] + 0.5))
        faces.append(face)


def trace_phase_level_line(
    phases: PhaseField, lam: float = LAMBDA, u: np.ndarray | None = None
) -> DualPath:
    """Level line of ``sin(2 pi a + T u)`` for observed phases ``a``.

    The sine is the imaginary part of ``exp(i T (phi + u))`` evaluated
    from the observation alone, so the trace needs no lift.  Requires
    ``T * lam < pi`` so the comparison field cannot wrap a boundary
    vertex past the sine's sign change.
    """
    lattice = phases.lattice
    if not phases.T * lam < np.pi:
        raise ValueError("need T * lam < pi for an unambiguous boundary sign")
    if u is None:
        u = harmonic_boundary(lattice, lam)
    S = np.sin(2.0 * np.pi * phases.a + phases.T * u)
    return trace_level_line(lattice, S)


def check_sign_rule(path: DualPath, S: np.ndarray) -> bool:
    """Exhaustively re-check every crossed edge of a traced path."""
    S = np.asarray(S, dtype=float)
    left = S[path.crossed[:, 0]]
    right = S[path.crossed[:, 1]]
    return bool(np.all(left < 0.0) and np.all(right >= 0.0))


def hausdorff(p1: DualPath, p2: DualPath) -> float:
    """Symmetric Hausdorff distance between path points in ``[-1, 1]^2``."""
    a, b = p1.paper_points, p2.paper_points
    return max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])


def reconstructed_level_line(
    phases: PhaseField,
    config: SamplerConfig | None = None,
    lam: float = LAMBDA,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
) -> tuple[DualPath, ReconResult]:
    """Trace the level line of the conditional mean field plus comparison.

    Runs the posterior sampler on ``phases``, adds the harmonic
    comparison field, and traces; returns the path together with the
    reconstruction result so convergence diagnostics propagate.
    """
    if config is None:
        config = SamplerConfig()
    result = reconstruct(phases, config=config, rng=rng, seed=seed)
    u = harmonic_boundary(phases.lattice, lam)
    path = trace_level_line(phases.lattice, result.mean_field + u)
    return path, result
