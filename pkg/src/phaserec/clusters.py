"""Agreement sets and disagreement clusters of coupled lift pairs.

Two integer lifts compatible with the same phases can differ; where they
do, reconstruction is ambiguous.  This module labels the agreement
structure:

* ``agreement_dirichlet``: the agreement set ``I`` is the boundary-connected
  component of ``{m1 = m2}``; everything else splits into disagreement
  clusters ``O(x)``.
* ``agreement_free``: with only a rooted field, the lifts may differ by an
  integer ``k`` on large regions; the dominant region (diameter above
  ``n/2``) fixes the global shift ``m_I``, with a deterministic dichotomy
  when zero or two such regions exist.
* ``cluster_tail``: Monte Carlo survival curve of the cluster diameter at
  a vertex, with an exponential-rate fit — the Peierls diagnostic.

Any edge leaving a cluster joins the agreement set, and across such an
edge one of the two lifts must jump by at least half a fiber period;
``boundary_edge_margin`` checks that rule exhaustively.

Diameters are Chebyshev (largest coordinate span, in lattice steps): exact
in linear time, and bounded by the lattice side, which keeps the trivial
survival cutoff at ``L > 2n`` exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import ivgff
from .gff import GffSampler
from .lattice import Lattice
from .phases import TWO_PI, beta_of, observe
from .stats import linear_fit

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


def _check_integer_field(lattice: Lattice, m) -> np.ndarray:
    m = np.asarray(m)
    if m.shape != (lattice.num_vertices,):
        raise ValueError("integer field must have one entry per vertex")
    if not np.issubdtype(m.dtype, np.integer):
        raise ValueError("integer field must have integer dtype")
    return m.astype(np.int64)


def _label_mask(lattice: Lattice, mask: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected component labels (1..k) of a vertex mask, 0 off-mask."""
    grid = mask.reshape(lattice.rows, lattice.cols)
    labels, count = ndimage.label(grid, structure=_CROSS)
    return labels.ravel(), count


@dataclass(frozen=True)
class ComponentMap:
    """Partition of the lattice into the agreement set and clusters.

    ``labels[v] == 0`` marks the agreement set ``I`` (possibly empty);
    positive labels enumerate the connected clusters of the complement.
    ``diams[c]`` is the Chebyshev diameter of component ``c`` in lattice
    steps (``diams[0] = -1`` when ``I`` is empty).  ``m_I`` is the global
    integer shift on ``I`` for free-boundary pairs, ``None`` otherwise.
    """

    lattice: Lattice
    labels: np.ndarray
    diams: np.ndarray
    m_I: int | None
    empty_I_flag: bool

    @property
    def n_clusters(self) -> int:
        return self.diams.size - 1

    def cluster_label(self, x: int) -> int:
        return int(self.labels[x])

    def cluster_of(self, x: int) -> np.ndarray:
        """Vertices of the cluster containing ``x`` (empty if ``x`` agrees)."""
        lab = self.labels[x]
        if lab == 0:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(self.labels == lab).astype(np.int64)

    def diam_of(self, x: int) -> int:
        """Chebyshev diameter of ``x``'s cluster; ``-1`` when ``x`` agrees."""
        lab = int(self.labels[x])
        if lab == 0:
            return -1
        return int(self.diams[lab])

    def cluster_sizes(self) -> np.ndarray:
        """Vertex counts per label (index 0 is the agreement set)."""
        return np.bincount(self.labels, minlength=self.diams.size)


def _component_diams(lattice: Lattice, labels: np.ndarray, n_labels: int) -> np.ndarray:
    """Chebyshev diameter per label 0..n_labels; -1 for absent labels."""
    diams = np.full(n_labels + 1, -1, dtype=np.int64)
    present = np.unique(labels)
    if present.size:
        idx = present.tolist()
        rmin = ndimage.minimum(lattice.row, labels, index=idx)
        rmax = ndimage.maximum(lattice.row, labels, index=idx)
        cmin = ndimage.minimum(lattice.col, labels, index=idx)
        cmax = ndimage.maximum(lattice.col, labels, index=idx)
        spans = np.maximum(
            np.asarray(rmax) - np.asarray(rmin), np.asarray(cmax) - np.asarray(cmin)
        )
        diams[present] = spans.astype(np.int64)
    return diams


def _finish_map(
    lattice: Lattice, I_mask: np.ndarray, m_I: int | None
) -> ComponentMap:
    o_labels, _ = _label_mask(lattice, ~I_mask)
    labels = o_labels.astype(np.int64)  # agreement set keeps label 0
    n_labels = int(labels.max(initial=0))
    diams = _component_diams(lattice, labels, n_labels)
    if I_mask.any():
        empty = False
    else:
        empty = True
        diams[0] = -1
    return ComponentMap(
        lattice=lattice, labels=labels, diams=diams, m_I=m_I, empty_I_flag=empty
    )


def agreement_dirichlet(lattice: Lattice, m1, m2) -> ComponentMap:
    """Agreement set = boundary-connected component of ``{m1 = m2}``.

    Equality is exact integer equality.  Agreeing pockets enclosed by
    disagreement are *not* part of ``I``; they join the surrounding
    cluster of the complement.
    """
    m1 = _check_integer_field(lattice, m1)
    m2 = _check_integer_field(lattice, m2)
    eq = m1 == m2
    eq_labels, _ = _label_mask(lattice, eq)
    touching = np.unique(eq_labels[lattice.boundary])
    touching = touching[touching > 0]
    I_mask = np.isin(eq_labels, touching) & eq
    return _finish_map(lattice, I_mask, None)


def agreement_free(lattice: Lattice, m1, m2) -> ComponentMap:
    """Dominant-shift dichotomy for free-boundary lift pairs.

    For each integer ``k`` taken by ``m2 - m1``, the largest connected
    component of ``{m2 - m1 = k}`` (ties broken by smallest contained
    vertex index) is a candidate agreement set.  Exactly one candidate of
    Chebyshev diameter above ``n/2`` fixes ``I`` and ``m_I``; zero or two
    such candidates leave the shift ambiguous: ``I`` is empty and the
    whole lattice forms one cluster.
    """
    if lattice.n is None:
        raise ValueError("free agreement needs a square lattice with known n")
    m1 = _check_integer_field(lattice, m1)
    m2 = _check_integer_field(lattice, m2)
    d = m2 - m1
    threshold = lattice.n / 2.0
    qualifying: list[tuple[int, np.ndarray]] = []
    for k in np.unique(d):
        labels_k, count = _label_mask(lattice, d == k)
        if count == 0:
            continue
        sizes = np.bincount(labels_k, minlength=count + 1)[1:]
        best_size = sizes.max()
        # ties: the component whose smallest vertex index comes first
        best_labels = np.flatnonzero(sizes == best_size) + 1
        first_vertex = [np.flatnonzero(labels_k == lab)[0] for lab in best_labels]
        chosen = int(best_labels[int(np.argmin(first_vertex))])
        mask = labels_k == chosen
        diams = _component_diams(lattice, np.where(mask, 1, 0), 1)
        if diams[1] > threshold:
            qualifying.append((int(k), mask))
    if len(qualifying) == 1:
        k, mask = qualifying[0]
        return _finish_map(lattice, mask, k)
    # ambiguous (none or several dominant shifts): everything is one cluster
    return _finish_map(lattice, np.zeros(lattice.num_vertices, dtype=bool), None)


def boundary_edge_margin(
    lattice: Lattice,
    m1,
    m2,
    a,
    T: float,
    cmap: ComponentMap | None = None,
) -> float:
    """Worst slack in the cluster-boundary gradient rule.

    Across every edge separating a cluster from the agreement set, at
    least one of the two lifts must jump by ``pi / T`` or more.  Returns
    ``min over such edges of max(|grad lift1|, |grad lift2|) - pi/T``
    (``+inf`` when no such edge exists); the rule holds when this is
    nonnegative up to float rounding.
    """
    if cmap is None:
        cmap = agreement_dirichlet(lattice, m1, m2)
    av = ivgff.shift_vector(lattice, a)
    scale = TWO_PI / T
    lift1 = scale * (np.asarray(m1) + av)
    lift2 = scale * (np.asarray(m2) + av)
    lab_t = cmap.labels[lattice.edge_tails]
    lab_h = cmap.labels[lattice.edge_heads]
    crossing = lab_t != lab_h
    if not crossing.any():
        return float("inf")
    g1 = np.abs(lattice.gradient(lift1))[crossing]
    g2 = np.abs(lattice.gradient(lift2))[crossing]
    return float(np.min(np.maximum(g1, g2)) - np.pi / T)


@dataclass(frozen=True)
class ClusterTail:
    """Empirical cluster-diameter survival curve with an exponential fit.

    ``survival[j] = P(diam of the cluster at x >= Ls[j])``; the fit is of
    ``log survival`` against ``L`` over the strictly positive part of the
    curve (``degenerate`` when fewer than three such points exist).
    ``varpi = -slope`` is the decay-rate estimate; ``rule_margin`` is the
    worst boundary-edge slack observed across all sampled pairs.
    """

    T: float
    n: int
    Ls: np.ndarray
    survival: np.ndarray
    slope: float
    varpi: float
    r_squared: float
    n_samples: int
    n_excluded: int
    n_nonempty: int
    rule_margin: float
    degenerate: bool


def cluster_tail(
    T: float,
    n: int,
    n_samples: int,
    x: int | None = None,
    pair_config: ivgff.PairConfig = ivgff.PairConfig(),
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    Ls: np.ndarray | None = None,
) -> ClusterTail:
    """Monte Carlo tail of the disagreement-cluster diameter at ``x``.

    Each sample: fresh field, observed phases, one coupled lift pair,
    Dirichlet agreement map, and the Chebyshev diameter of the cluster
    containing ``x`` (no cluster counts as diameter ``-1``).  The
    boundary-edge gradient rule is checked on every sampled pair.
    """
    lattice = _build_default(n)
    if x is None:
        x = lattice.center
    if not lattice.interior_mask[x]:
        raise ValueError("x must be an interior vertex")
    if rng is None:
        rng = np.random.default_rng(seed)
    if Ls is None:
        Ls = np.arange(1, 2 * n + 1)
    Ls = np.asarray(Ls, dtype=np.int64)
    beta = beta_of(T)
    sampler = GffSampler(lattice)
    diams = []
    excluded = 0
    margin = float("inf")
    for _ in range(n_samples):
        phi = sampler.sample(rng)
        a = observe(lattice, phi, T)
        m1, m2, ok = ivgff.sample_pair_info(lattice, a.a, beta, rng, pair_config)
        if not ok:
            excluded += 1
            continue
        cmap = agreement_dirichlet(lattice, m1, m2)
        diams.append(cmap.diam_of(x))
        margin = min(margin, boundary_edge_margin(lattice, m1, m2, a.a, T, cmap))
    diams = np.asarray(diams, dtype=np.int64)
    used = diams.size
    survival = (
        np.array([(diams >= L).mean() for L in Ls]) if used else np.zeros(Ls.size)
    )
    positive = survival > 0
    if positive.sum() >= 3:
        slope, _, r2 = linear_fit(Ls[positive], np.log(survival[positive]))
        degenerate = False
    else:
        slope, r2 = float("nan"), float("nan")
        degenerate = True
    return ClusterTail(
        T=T,
        n=n,
        Ls=Ls,
        survival=survival,
        slope=slope,
        varpi=-slope,
        r_squared=r2,
        n_samples=used,
        n_excluded=excluded,
        n_nonempty=int((diams >= 0).sum()),
        rule_margin=margin,
        degenerate=degenerate,
    )


def _build_default(n: int) -> Lattice:
    from .lattice import build_lattice

    return build_lattice(n, bc="dirichlet")
