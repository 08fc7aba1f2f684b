"""Grid domains with discrete vector calculus and Green functions.

Vertices form a ``rows x cols`` grid indexed ``v = r*cols + c``.  Each
undirected nearest-neighbour edge is stored once, oriented rightward or
upward (tail index < head index); edge fields are arrays over these
oriented edges, and reversing an edge negates the value.

With ``grad S(e) = S(head) - S(tail)``, ``div A(x) = sum of A over edges
directed out of x`` and ``lap = div grad``, the summation-by-parts identity

    <grad S, A>_E  =  <S, -div A>_V

holds exactly, where the edge inner product sums every undirected edge once
(equivalently half the sum over both orientations) and the vertex inner
product sums every vertex.

Two boundary conventions are supported:

* ``"dirichlet"``: the boundary is the outer frame of the grid; fields that
  are "zero on the boundary" vanish on the frame.
* ``"free"``: the boundary is the single corner vertex ``(r=0, c=0)``; all
  other vertices are interior.

The Green function is ``G = (-lap)^{-1}`` on interior vertices with zero
boundary values.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

_BCS = ("dirichlet", "free")

# Dense Green matrices are only materialized below this many interior
# vertices; larger lattices should use column solves (``green_field``).
_GREEN_MATRIX_CAP = 5000


class Lattice:
    """A rectangular grid graph with a marked boundary.

    Parameters
    ----------
    rows, cols:
        Vertex grid dimensions (each at least 2).
    bc:
        ``"dirichlet"`` (outer frame is boundary) or ``"free"`` (only the
        corner vertex ``(0, 0)`` is boundary).
    spacing:
        Euclidean distance between neighbours, used only for coordinates.
    origin:
        Coordinates ``(x, y)`` of vertex ``(r=0, c=0)``.
    """

    def __init__(
        self,
        rows: int,
        cols: int,
        bc: str = "dirichlet",
        spacing: float = 1.0,
        origin: tuple[float, float] = (0.0, 0.0),
    ) -> None:
        if rows < 2 or cols < 2:
            raise ValueError(f"grid must be at least 2x2, got {rows}x{cols}")
        if bc not in _BCS:
            raise ValueError(f"bc must be one of {_BCS}, got {bc!r}")
        self.rows = int(rows)
        self.cols = int(cols)
        self.bc = bc
        self.spacing = float(spacing)
        self.origin = (float(origin[0]), float(origin[1]))
        #: side parameter when built by :func:`build_lattice`, else None
        self.n: int | None = None

        N = self.rows * self.cols
        self.num_vertices = N
        self.row = np.repeat(np.arange(self.rows, dtype=np.int32), self.cols)
        self.col = np.tile(np.arange(self.cols, dtype=np.int32), self.rows)
        self.parity = ((self.row + self.col) % 2).astype(np.int8)

        xs = self.origin[0] + self.spacing * self.col
        ys = self.origin[1] + self.spacing * self.row
        self.coords = np.column_stack([xs, ys])

        if bc == "dirichlet":
            on_frame = (
                (self.row == 0)
                | (self.row == self.rows - 1)
                | (self.col == 0)
                | (self.col == self.cols - 1)
            )
            self.boundary_mask = on_frame
        else:
            self.boundary_mask = np.zeros(N, dtype=bool)
            self.boundary_mask[0] = True
        self.interior_mask = ~self.boundary_mask
        self.interior = np.flatnonzero(self.interior_mask).astype(np.int32)
        self.boundary = np.flatnonzero(self.boundary_mask).astype(np.int32)
        self.num_interior = int(self.interior.size)
        #: position of each vertex in the interior ordering, -1 on the boundary
        self.interior_pos = np.full(N, -1, dtype=np.int32)
        self.interior_pos[self.interior] = np.arange(self.num_interior, dtype=np.int32)

        # Oriented edges: rightward then upward, row-major within each group.
        v = np.arange(N, dtype=np.int32)
        right_tails = v[self.col < self.cols - 1]
        up_tails = v[self.row < self.rows - 1]
        self.edge_tails = np.concatenate([right_tails, up_tails])
        self.edge_heads = np.concatenate([right_tails + 1, up_tails + self.cols])
        self.num_edges = int(self.edge_tails.size)

        self.degree = np.zeros(N, dtype=np.int32)
        np.add.at(self.degree, self.edge_tails, 1)
        np.add.at(self.degree, self.edge_heads, 1)

        # Fixed-width neighbour table for jitted kernels, padded with -1.
        self.neighbors = np.full((N, 4), -1, dtype=np.int32)
        fill = np.zeros(N, dtype=np.int32)
        for a, b in ((self.edge_tails, self.edge_heads), (self.edge_heads, self.edge_tails)):
            for t, h in zip(a, b):
                self.neighbors[t, fill[t]] = h
                fill[t] += 1

        if bc == "dirichlet":
            self.boundary_distance = np.minimum.reduce(
                [self.row, self.rows - 1 - self.row, self.col, self.cols - 1 - self.col]
            ).astype(np.int32)
        else:
            self.boundary_distance = (self.row + self.col).astype(np.int32)

    @cached_property
    def checkerboard_interior(self) -> np.ndarray:
        """Interior vertices, even ``(row+col)`` parity first, row-major within."""
        par = self.parity[self.interior]
        return np.concatenate(
            [self.interior[par == 0], self.interior[par == 1]]
        ).astype(np.int64)

    # ------------------------------------------------------------------
    # indexing helpers

    def index(self, r: int, c: int) -> int:
        """Vertex index of grid position ``(r, c)``."""
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"position ({r}, {c}) outside {self.rows}x{self.cols} grid")
        return r * self.cols + c

    @property
    def center(self) -> int:
        """Index of the middle vertex (exact for odd dimensions)."""
        return self.index(self.rows // 2, self.cols // 2)

    def vertex_at(self, x: float, y: float) -> int:
        """Vertex index closest to coordinates ``(x, y)``."""
        c = round((x - self.origin[0]) / self.spacing)
        r = round((y - self.origin[1]) / self.spacing)
        return self.index(int(r), int(c))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Lattice({self.rows}x{self.cols}, bc={self.bc!r})"

    # ------------------------------------------------------------------
    # discrete calculus

    def gradient(self, S: np.ndarray) -> np.ndarray:
        """Edge field ``S(head) - S(tail)`` over the oriented edges."""
        S = np.asarray(S)
        return S[..., self.edge_heads] - S[..., self.edge_tails]

    def divergence(self, A: np.ndarray) -> np.ndarray:
        """Vertex field summing ``A`` over edges directed out of each vertex."""
        A = np.asarray(A, dtype=float)
        out = np.zeros(self.num_vertices)
        np.add.at(out, self.edge_tails, A)
        np.subtract.at(out, self.edge_heads, A)
        return out

    def laplacian(self, S: np.ndarray) -> np.ndarray:
        """``div(grad(S))``; at each vertex the sum of neighbour differences."""
        return self.divergence(self.gradient(S))

    def vertex_inner(self, S: np.ndarray, T: np.ndarray) -> float:
        """Sum of ``S*T`` over all vertices."""
        return float(np.dot(np.ravel(S), np.ravel(T)))

    def edge_inner(self, A: np.ndarray, B: np.ndarray) -> float:
        """Sum of ``A*B`` over undirected edges (each edge once)."""
        return float(np.dot(np.ravel(A), np.ravel(B)))

    def dirichlet_energy(self, S: np.ndarray) -> float:
        """``<grad S, grad S>_E``."""
        g = self.gradient(S)
        return float(np.dot(g, g))

    # ------------------------------------------------------------------
    # sparse operators

    @cached_property
    def gradient_matrix(self) -> sp.csr_matrix:
        """Sparse ``num_edges x num_vertices`` matrix of the gradient."""
        E = self.num_edges
        rows = np.concatenate([np.arange(E), np.arange(E)])
        cols = np.concatenate([self.edge_heads, self.edge_tails])
        vals = np.concatenate([np.ones(E), -np.ones(E)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(E, self.num_vertices))

    @cached_property
    def neg_laplacian(self) -> sp.csr_matrix:
        """Sparse matrix of ``-lap`` on all vertices (``D^T D``)."""
        D = self.gradient_matrix
        return (D.T @ D).tocsr()

    @cached_property
    def neg_laplacian_interior(self) -> sp.csc_matrix:
        """``-lap`` restricted to interior rows and columns (SPD)."""
        L = self.neg_laplacian
        return L[self.interior][:, self.interior].tocsc()

    @cached_property
    def _interior_solver(self) -> spla.SuperLU:
        return spla.splu(self.neg_laplacian_interior)

    def solve_interior(self, rhs: np.ndarray) -> np.ndarray:
        """Solve ``(-lap_II) u = rhs`` for interior-indexed ``rhs``."""
        return self._interior_solver.solve(np.asarray(rhs, dtype=float))

    def solve_poisson(
        self, f: np.ndarray, boundary_values: np.ndarray | None = None
    ) -> np.ndarray:
        """Solve ``-lap u = f`` on the interior with prescribed boundary values.

        ``f`` is a full vertex field (boundary entries ignored); the result is
        a full vertex field equal to ``boundary_values`` (default zero) on the
        boundary.
        """
        f = np.asarray(f, dtype=float)
        rhs = f[self.interior].copy()
        u = np.zeros(self.num_vertices)
        if boundary_values is not None:
            g = np.asarray(boundary_values, dtype=float)
            if g.shape == (self.boundary.size,):
                gB = g
            else:
                gB = g[self.boundary]
            L_IB = self.neg_laplacian[self.interior][:, self.boundary]
            rhs -= L_IB @ gB
            u[self.boundary] = gB
        u[self.interior] = self.solve_interior(rhs)
        return u

    def harmonic_extension(self, values: np.ndarray, fixed_mask: np.ndarray) -> np.ndarray:
        """Extend ``values`` on ``fixed_mask`` vertices harmonically elsewhere.

        Every connected component of the complement of ``fixed_mask`` must
        touch a fixed vertex.  Returns a full vertex field agreeing with
        ``values`` on the fixed set and with zero Laplacian off it.
        """
        fixed_mask = np.asarray(fixed_mask, dtype=bool)
        if fixed_mask.shape != (self.num_vertices,):
            raise ValueError("fixed_mask must be a full vertex mask")
        if not fixed_mask.any():
            raise ValueError("fixed set is empty")
        values = np.asarray(values, dtype=float)
        free = np.flatnonzero(~fixed_mask)
        fixed = np.flatnonzero(fixed_mask)
        u = np.zeros(self.num_vertices)
        u[fixed] = values[fixed]
        if free.size:
            L = self.neg_laplacian
            L_FF = L[free][:, free].tocsc()
            rhs = -(L[free][:, fixed] @ u[fixed])
            u[free] = spla.splu(L_FF).solve(rhs)
        return u

    # ------------------------------------------------------------------
    # Green function

    def green_field(self, x: int) -> np.ndarray:
        """Full vertex field ``G(x, .)``, zero on the boundary.

        For a boundary vertex ``x`` the whole field is zero, matching the
        convention that ``G`` vanishes whenever either argument lies on the
        boundary.
        """
        u = np.zeros(self.num_vertices)
        if self.interior_pos[x] < 0:
            return u
        e = np.zeros(self.num_interior)
        e[self.interior_pos[x]] = 1.0
        u[self.interior] = self.solve_interior(e)
        return u

    def green(self, x: int, y: int) -> float:
        """Green function entry ``G(x, y)``; zero if either vertex is boundary."""
        return float(self.green_field(x)[y])

    def green_matrix(self) -> np.ndarray:
        """Dense ``num_interior x num_interior`` Green matrix.

        Only available below the dense cap (see ``_GREEN_MATRIX_CAP``); use
        :meth:`green_field` column solves beyond that.
        """
        k = self.num_interior
        if k > _GREEN_MATRIX_CAP:
            raise ValueError(
                f"{k} interior vertices exceed the dense Green matrix cap "
                f"({_GREEN_MATRIX_CAP}); use green_field column solves"
            )
        return self._interior_solver.solve(np.eye(k))


def build_lattice(n: int, bc: str = "dirichlet") -> Lattice:
    """Standard square domain: ``(2n+1)^2`` vertices covering ``[-1, 1]^2``.

    Vertices sit at spacing ``1/n``; with ``bc="dirichlet"`` the boundary is
    the frame ``max(|x|, |y|) = 1``, with ``bc="free"`` it is the single
    corner ``(-1, -1)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    lat = Lattice(2 * n + 1, 2 * n + 1, bc=bc, spacing=1.0 / n, origin=(-1.0, -1.0))
    lat.n = n
    return lat


def build_grid(rows: int, cols: int, bc: str = "dirichlet") -> Lattice:
    """Rectangular grid with unit spacing and origin at ``(0, 0)``."""
    return Lattice(rows, cols, bc=bc)
