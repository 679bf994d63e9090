import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bjjsim.errors import ConfigurationError, DomainError
from bjjsim.lattice import LatticeShape, ModelParams, build_hamiltonian
from bjjsim.propagation import AmplitudeField, decompose, evolve, evolve_trajectory

from conftest import OMEGA


def random_field(rng, shape):
    c = rng.normal(size=shape.n_sites) + 1j * rng.normal(size=shape.n_sites)
    return AmplitudeField.from_unnormalized(shape, c)


def rk4_evolve(m, c0, t, dt):
    """Fixed-step 4th-order Runge-Kutta for dc/dt = i M c."""
    f = lambda c: 1j * (m @ c)
    steps = int(round(t / dt))
    h = t / steps
    c = np.array(c0, dtype=complex)
    for _ in range(steps):
        k1 = f(c)
        k2 = f(c + 0.5 * h * k1)
        k3 = f(c + 0.5 * h * k2)
        k4 = f(c + h * k3)
        c = c + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return c


def test_field_must_be_normalized():
    with pytest.raises(DomainError):
        AmplitudeField(LatticeShape(1, 0), [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        AmplitudeField(LatticeShape(1, 0), [1.0])


def test_decompose_pauli():
    kappa = 0.7
    prop = decompose(build_hamiltonian(LatticeShape(1, 0), ModelParams(2 * kappa, 0.0)))
    np.testing.assert_allclose(prop.eigenvalues, [-kappa, kappa], atol=1e-15)


def test_decompose_zero_matrix():
    prop = decompose(build_hamiltonian(LatticeShape(2, 1), ModelParams(0.0, 0.0)))
    assert np.all(prop.eigenvalues == 0)
    q = np.abs(prop.eigenvectors)
    assert np.allclose(np.sort(q, axis=0)[-1], 1.0)


def test_free_spectrum_is_symmetric(square):
    lam = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA))).eigenvalues
    np.testing.assert_allclose(np.sort(lam), -np.sort(lam)[::-1], atol=1e-12)


def test_decomposition_invariants(square):
    h = build_hamiltonian(square, ModelParams.isospecific(OMEGA, 0.2))
    prop = decompose(h)
    q, lam = prop.eigenvectors, prop.eigenvalues
    assert np.abs((q * lam) @ q.T - h.matrix).max() <= 1e-10 * np.abs(h.matrix).max()
    assert np.abs(q.T @ q - np.eye(q.shape[0])).max() <= 1e-10


def test_single_particle_tunnels():
    shape = LatticeShape(0, 1)
    omega_b = 0.3
    prop = decompose(build_hamiltonian(shape, ModelParams(0.0, omega_b)))
    left = AmplitudeField.fock(shape, 0, 1)
    full = np.abs(evolve(prop, left, math.pi / omega_b).amplitudes) ** 2
    assert full[0] == pytest.approx(1.0, abs=1e-14)
    half = np.abs(evolve(prop, left, math.pi / (2 * omega_b)).amplitudes) ** 2
    np.testing.assert_allclose(half, [0.5, 0.5], atol=1e-14)


def test_zero_time_is_identity(square):
    rng = np.random.default_rng(1)
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA, 3.0)))
    field = random_field(rng, square)
    assert np.abs(evolve(prop, field, 0.0).amplitudes - field.amplitudes).max() <= 1e-12


def test_unitarity_composition_reversal(square):
    rng = np.random.default_rng(2)
    prop = decompose(build_hamiltonian(square, ModelParams(OMEGA, 0.8 * OMEGA, 0.1, -0.05, 0.02)))
    for _ in range(100):
        field = random_field(rng, square)
        t1, t2 = rng.uniform(0, 4 * math.pi / OMEGA, size=2)
        out = evolve(prop, field, t1)
        assert abs(np.vdot(out.amplitudes, out.amplitudes).real - 1) <= 1e-10
        both = evolve(prop, out, t2).amplitudes
        assert np.abs(both - evolve(prop, field, t1 + t2).amplitudes).max() <= 1e-9
        assert np.abs(evolve(prop, out, -t1).amplitudes - field.amplitudes).max() <= 1e-9


@settings(max_examples=8, deadline=None)
@given(
    st.integers(0, 2),
    st.integers(0, 2),
    st.floats(-1.0, 1.0),
    st.floats(0.05, 2.0),
    st.integers(0, 2**32 - 1),
)
def test_matches_runge_kutta(n_a, n_b, u_ratio, omega_t, seed):
    omega = 1.0
    shape = LatticeShape(n_a, n_b)
    params = ModelParams(omega, 0.7 * omega, u_ratio, -0.5 * u_ratio, 0.3 * u_ratio)
    h = build_hamiltonian(shape, params)
    field = random_field(np.random.default_rng(seed), shape)
    exact = evolve(decompose(h), field, omega_t / omega).amplitudes
    brute = rk4_evolve(h.matrix, field.amplitudes, omega_t / omega, 1e-4 / omega)
    assert np.abs(exact - brute).max() <= 1e-8


def test_trajectory_matches_pointwise(square):
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA, 0.01)))
    start = AmplitudeField.fock(square, 3, 3)
    ts = np.linspace(0, 15, 7)
    traj = evolve_trajectory(prop, start, ts)
    for t, f in zip(ts, traj):
        np.testing.assert_allclose(f.amplitudes, evolve(prop, start, t).amplitudes, atol=1e-13)
    assert np.abs(evolve_trajectory(prop, start, [0.0])[0].amplitudes - start.amplitudes).max() <= 1e-12


def test_jx_lattice_revival():
    shape = LatticeShape(0, 12)
    prop = decompose(build_hamiltonian(shape, ModelParams(0.0, OMEGA)))
    start = AmplitudeField.fock(shape, 0, 12)
    period = 2 * math.pi / OMEGA
    traj = evolve_trajectory(prop, start, [0.0, period, 2 * period])
    for f in traj:
        assert start.fidelity(f) >= 1 - 1e-10


def test_trajectory_rejects_unordered_grid(square):
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA)))
    with pytest.raises(ConfigurationError):
        evolve_trajectory(prop, AmplitudeField.fock(square, 0, 0), [0.0, 2.0, 1.0])


def test_shape_mismatch(square):
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA)))
    with pytest.raises(ConfigurationError):
        evolve(prop, AmplitudeField.fock(LatticeShape(0, 12), 0, 0), 1.0)


def test_shifted_detuning_changes_only_phase(square):
    params = ModelParams.isospecific(OMEGA, 0.3 * OMEGA)
    raw = decompose(build_hamiltonian(square, params, "raw"))
    shifted = decompose(build_hamiltonian(square, params, "shifted"))
    field = random_field(np.random.default_rng(3), square)
    for t in np.linspace(0, 30, 11):
        a = np.abs(evolve(raw, field, t).amplitudes) ** 2
        b = np.abs(evolve(shifted, field, t).amplitudes) ** 2
        assert np.abs(a - b).max() <= 1e-10
