import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phaserec.lattice import build_grid, build_lattice
from phaserec.stats import linear_fit


def test_smallest_square_counts():
    lat = build_lattice(1)
    assert lat.num_vertices == 9
    assert lat.num_interior == 1
    assert lat.num_edges == 12
    assert lat.interior[0] == lat.center


@pytest.mark.parametrize("n", [2, 3, 5])
def test_square_counts(n):
    lat = build_lattice(n)
    assert lat.num_vertices == (2 * n + 1) ** 2
    assert lat.num_interior == (2 * n - 1) ** 2
    assert lat.num_edges == 2 * (2 * n + 1) * (2 * n)


def test_rectangle_counts():
    lat = build_grid(3, 7)
    assert lat.num_vertices == 21
    assert lat.num_interior == 5
    assert lat.num_edges == 3 * 6 + 2 * 7
    assert lat.degree.max() == 4
    assert lat.degree.min() == 2


def test_free_boundary_is_one_corner():
    lat = build_lattice(2, bc="free")
    assert lat.boundary.tolist() == [0]
    assert lat.num_interior == lat.num_vertices - 1
    # graph distance to the root corner is the Manhattan distance
    assert lat.boundary_distance[lat.index(2, 3)] == 5


def test_coordinates_cover_square():
    lat = build_lattice(4)
    assert np.allclose(lat.coords.min(axis=0), [-1.0, -1.0])
    assert np.allclose(lat.coords.max(axis=0), [1.0, 1.0])
    assert np.allclose(lat.coords[lat.center], [0.0, 0.0])
    assert lat.vertex_at(0.5, -0.25) == lat.index(3, 6)


def test_boundary_distance_square():
    lat = build_lattice(3)
    assert lat.boundary_distance[lat.center] == 3
    assert lat.boundary_distance[lat.boundary].max() == 0


@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_summation_by_parts(rows, cols, seed):
    lat = build_grid(rows, cols)
    rng = np.random.default_rng(seed)
    S = rng.normal(size=lat.num_vertices)
    A = rng.normal(size=lat.num_edges)
    lhs = lat.edge_inner(lat.gradient(S), A)
    rhs = lat.vertex_inner(S, -lat.divergence(A))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_energy_equals_vertex_pairing():
    lat = build_grid(5, 4)
    rng = np.random.default_rng(11)
    S = rng.normal(size=lat.num_vertices)
    assert lat.dirichlet_energy(S) == pytest.approx(
        lat.vertex_inner(S, -lat.laplacian(S)), rel=1e-12
    )


def test_laplacian_is_neighbour_sum():
    lat = build_grid(4, 5)
    rng = np.random.default_rng(7)
    S = rng.normal(size=lat.num_vertices)
    lap = lat.laplacian(S)
    for v in range(lat.num_vertices):
        nbrs = lat.neighbors[v][lat.neighbors[v] >= 0]
        assert lap[v] == pytest.approx(float(np.sum(S[nbrs] - S[v])), abs=1e-12)


def test_neighbour_table_matches_edges():
    lat = build_grid(3, 4)
    pairs = set()
    for t, h in zip(lat.edge_tails, lat.edge_heads):
        pairs.add((int(t), int(h)))
        pairs.add((int(h), int(t)))
    from_table = set()
    for v in range(lat.num_vertices):
        for u in lat.neighbors[v]:
            if u >= 0:
                from_table.add((v, int(u)))
    assert pairs == from_table
    assert np.array_equal(np.sum(lat.neighbors >= 0, axis=1), lat.degree)


def test_sparse_operators_match_dense():
    lat = build_grid(4, 4)
    rng = np.random.default_rng(3)
    S = rng.normal(size=lat.num_vertices)
    assert np.allclose(lat.gradient_matrix @ S, lat.gradient(S), atol=1e-12)
    assert np.allclose(lat.neg_laplacian @ S, -lat.laplacian(S), atol=1e-12)


def test_green_single_interior_vertex():
    # the sole interior vertex has degree 4, so the interior operator is [4]
    lat = build_lattice(1)
    c = lat.center
    assert lat.green(c, c) == pytest.approx(0.25, abs=1e-15)
    assert lat.green_matrix() == pytest.approx(np.array([[0.25]]))


def test_green_symmetric_positive():
    lat = build_lattice(3)
    G = lat.green_matrix()
    assert np.allclose(G, G.T, atol=1e-12)
    assert G.min() > 0
    assert np.linalg.eigvalsh(G).min() > 0


def test_green_field_matches_matrix():
    lat = build_grid(5, 6)
    G = lat.green_matrix()
    x = lat.interior[4]
    col = lat.green_field(x)
    assert np.allclose(col[lat.interior], G[4], atol=1e-12)
    assert np.all(col[lat.boundary] == 0)
    # boundary arguments give zero by convention
    b = int(lat.boundary[0])
    assert lat.green(b, x) == 0.0
    assert lat.green(x, b) == 0.0


def test_laplacian_of_center_spike():
    lat = build_lattice(1)
    S = np.zeros(lat.num_vertices)
    S[lat.center] = 1.0
    assert lat.laplacian(S)[lat.center] == pytest.approx(-4.0, abs=1e-15)


def test_laplacian_of_quadratic_is_constant():
    # second differences of x^2 + y^2 equal 2 h^2 per axis at interior vertices
    lat = build_lattice(3)
    S = lat.coords[:, 0] ** 2 + lat.coords[:, 1] ** 2
    lap = lat.laplacian(S)
    h2 = lat.spacing**2
    assert np.allclose(lap[lat.interior], 4 * h2, atol=1e-12)
    assert 4 * h2 > 0


def test_green_diagonal_grows_logarithmically():
    ns = [4, 8, 16, 32]
    diag = []
    for n in ns:
        lat = build_lattice(n)
        diag.append(lat.green(lat.center, lat.center))
    slope, _, r2 = linear_fit(np.log(ns), diag)
    assert slope > 0
    assert r2 > 0.99


def test_free_boundary_green():
    lat = build_lattice(2, bc="free")
    G = lat.green_matrix()
    assert np.allclose(G, G.T, atol=1e-12)
    assert np.linalg.eigvalsh(G).min() > 0


def test_poisson_round_trip():
    lat = build_lattice(5)
    rng = np.random.default_rng(19)
    f = rng.normal(size=lat.num_vertices)
    u = lat.solve_poisson(f)
    res = -lat.laplacian(u)
    assert np.max(np.abs(res[lat.interior] - f[lat.interior])) <= 1e-9
    assert np.all(u[lat.boundary] == 0)


def test_poisson_affine_boundary_reproduced():
    # affine functions are discrete-harmonic, so they solve the zero-source
    # problem with their own boundary values
    lat = build_lattice(4)
    affine = 0.7 * lat.coords[:, 0] - 1.3 * lat.coords[:, 1] + 0.2
    u = lat.solve_poisson(np.zeros(lat.num_vertices), boundary_values=affine)
    assert np.max(np.abs(u - affine)) <= 1e-10


def test_harmonic_extension_affine_exact():
    lat = build_grid(6, 5)
    affine = 0.3 * lat.coords[:, 0] + 0.9 * lat.coords[:, 1]
    fixed = lat.boundary_mask.copy()
    fixed[lat.index(3, 2)] = True
    u = lat.harmonic_extension(affine, fixed)
    assert np.max(np.abs(u - affine)) <= 1e-10


def test_harmonic_extension_max_principle():
    lat = build_lattice(3)
    rng = np.random.default_rng(23)
    vals = np.zeros(lat.num_vertices)
    vals[lat.boundary] = rng.normal(size=lat.boundary.size)
    u = lat.harmonic_extension(vals, lat.boundary_mask)
    lo, hi = vals[lat.boundary].min(), vals[lat.boundary].max()
    assert np.all(u >= lo - 1e-12)
    assert np.all(u <= hi + 1e-12)
    assert np.max(np.abs(lat.laplacian(u)[lat.interior])) <= 1e-9


def test_invalid_arguments():
    with pytest.raises(ValueError):
        build_grid(1, 5)
    with pytest.raises(ValueError):
        build_lattice(0)
    with pytest.raises(ValueError):
        build_grid(3, 3, bc="periodic")
    lat = build_grid(3, 3)
    with pytest.raises(IndexError):
        lat.index(3, 0)
