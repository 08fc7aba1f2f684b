import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phaserec.lattice import build_grid, build_lattice
from phaserec.phases import PhaseField, beta_of, lift, observe


def test_beta_of_pinned_values():
    assert beta_of(2 * np.pi) == pytest.approx(1.0, abs=1e-15)
    assert beta_of(2.0) == pytest.approx(np.pi**2, rel=1e-15)


def test_beta_of_strictly_decreasing():
    Ts = np.linspace(0.25, 30, 50)
    betas = [beta_of(T) for T in Ts]
    assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))


def test_beta_of_rejects_nonpositive():
    with pytest.raises(ValueError):
        beta_of(0.0)
    with pytest.raises(ValueError):
        beta_of(-1.0)


def test_observe_zero_field():
    lat = build_lattice(2)
    ph = observe(lat, np.zeros(lat.num_vertices), T=2.0)
    assert np.all(ph.a == 0)


def test_observe_full_period_wraps_to_zero():
    # phi = 2*pi/T is one full period: the shift computes to 1.0 (or a
    # float neighbour of it) and must wrap to exactly 0.0
    lat = build_lattice(1)
    phi = np.zeros(lat.num_vertices)
    phi[lat.center] = np.pi  # 2*pi/T with T = 2
    ph = observe(lat, phi, T=2.0)
    assert ph.a[lat.center] == 0.0


def test_observe_fractions_of_period():
    # a = (T/2pi) phi mod 1: a half period gives 0.5, a quarter gives 0.25
    lat = build_lattice(1)
    T = 2.0
    phi = np.zeros(lat.num_vertices)
    phi[lat.center] = np.pi / T
    assert observe(lat, phi, T).a[lat.center] == pytest.approx(0.5, abs=1e-12)
    phi[lat.center] = np.pi / (2 * T)
    assert observe(lat, phi, T).a[lat.center] == pytest.approx(0.25, abs=1e-12)


def test_observe_negative_values_wrap_into_unit_interval():
    lat = build_lattice(1)
    phi = np.zeros(lat.num_vertices)
    phi[lat.center] = -0.3 * (2 * np.pi / 5.0)
    a = observe(lat, phi, T=5.0).a[lat.center]
    assert a == pytest.approx(0.7, abs=1e-12)


def test_lift_pinned_values():
    lat = build_lattice(1)
    zeros = PhaseField(lat, T=2 * np.pi, a=np.zeros(lat.num_vertices))
    m = np.zeros(lat.num_vertices, dtype=int)
    assert np.all(lift(m, zeros) == 0)
    m[lat.center] = 1
    # at T = 2*pi the fiber spacing is exactly 1
    assert lift(m, zeros)[lat.center] == pytest.approx(1.0, abs=1e-15)


def test_lift_rejects_bad_fields():
    lat = build_lattice(1)
    other = build_grid(4, 4)
    ph = PhaseField(lat, T=2.0, a=np.zeros(lat.num_vertices))
    with pytest.raises(ValueError):
        lift(np.zeros(other.num_vertices, dtype=int), ph)
    with pytest.raises(ValueError):
        lift(np.zeros(lat.num_vertices), ph)  # not an integer dtype
    bad = np.zeros(lat.num_vertices, dtype=int)
    bad[lat.boundary[0]] = 2
    with pytest.raises(ValueError):
        lift(bad, ph)


def test_phase_field_validation():
    lat = build_lattice(1)
    with pytest.raises(ValueError):
        PhaseField(lat, T=2.0, a=np.full(lat.num_vertices, 1.0))
    bad = np.zeros(lat.num_vertices)
    bad[lat.boundary[0]] = 0.5
    with pytest.raises(ValueError):
        PhaseField(lat, T=2.0, a=bad)
    with pytest.raises(ValueError):
        PhaseField(lat, T=0.0, a=np.zeros(lat.num_vertices))


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.25, 0.5, 2.0, 2 * np.pi, 30.0]))
def test_round_trip_observe_lift(seed, T):
    lat = build_grid(4, 5)
    rng = np.random.default_rng(seed)
    a = np.zeros(lat.num_vertices)
    a[lat.interior] = rng.uniform(0, 1, size=lat.num_interior)
    ph = PhaseField(lat, T=T, a=a)
    m = np.zeros(lat.num_vertices, dtype=int)
    m[lat.interior] = rng.integers(-5, 6, size=lat.num_interior)
    back = observe(lat, lift(m, ph), T)
    wrap = np.abs(back.a - ph.a)
    wrap = np.minimum(wrap, 1.0 - wrap)
    assert np.max(wrap) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_observe_invariant_under_period_shifts(seed):
    lat = build_grid(3, 4)
    rng = np.random.default_rng(seed)
    T = 3.0
    phi = np.zeros(lat.num_vertices)
    phi[lat.interior] = rng.normal(size=lat.num_interior)
    k = np.zeros(lat.num_vertices)
    k[lat.interior] = rng.integers(-4, 5, size=lat.num_interior)
    base = observe(lat, phi, T).a
    shifted = observe(lat, phi + (2 * np.pi / T) * k, T).a
    wrap = np.abs(shifted - base)
    wrap = np.minimum(wrap, 1.0 - wrap)
    assert np.max(wrap) <= 1e-12
