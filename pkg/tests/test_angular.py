import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Rational
from sympy.physics.quantum.cg import CG

from bjjsim.angular import (
    LogFactorialTable,
    SpinLabel,
    analytic_amplitude,
    analytic_imbalance,
    analytic_probability,
    clebsch_gordan,
    coupled_basis,
    coupled_labels,
    coupled_state,
    imbalance_convolution,
    jz_moment,
    twice,
    wigner_d,
    wigner_d_matrix,
)
from bjjsim.errors import DomainError
from bjjsim.lattice import FockLabel, LatticeShape, ModelParams, build_hamiltonian
from bjjsim.observables import imbalance_distribution
from bjjsim.propagation import AmplitudeField, decompose, evolve

from conftest import OMEGA, T_SPLIT

half = Fraction(1, 2)


def spin_matrices(two_j):
    """J_x, J_y, J_z in the ascending-m basis built from ladder operators."""
    j = two_j / 2
    ms = np.arange(-two_j, two_j + 1, 2) / 2
    jp = np.zeros((two_j + 1, two_j + 1))
    for i in range(two_j):
        jp[i + 1, i] = math.sqrt(j * (j + 1) - ms[i] * (ms[i] + 1))
    jx = 0.5 * (jp + jp.T)
    jy = -0.5j * (jp - jp.T)
    return jx, jy, np.diag(ms)


def d_oracle(two_j, beta):
    return scipy.linalg.expm(-1j * beta * spin_matrices(two_j)[1]).real


def test_twice():
    assert twice(Fraction(3, 2)) == 3
    assert twice(2) == 4
    assert twice(-0.5) == -1
    with pytest.raises(DomainError):
        twice(0.3)


def test_spin_label_validation():
    SpinLabel(3, -1)
    with pytest.raises(DomainError):
        SpinLabel(2, 1)
    with pytest.raises(DomainError):
        SpinLabel(2, 4)


def test_log_factorial_table():
    table = LogFactorialTable(512)
    assert table(0) == 0.0
    diffs = np.diff(table.table)
    assert np.all(diffs >= 0)
    np.testing.assert_allclose(diffs, np.log(np.arange(1, 513)), atol=1e-12, rtol=0)
    assert table(600) == pytest.approx(math.lgamma(601), rel=1e-15)


@pytest.mark.parametrize("beta", [0.0, 0.4, 1.7, -2.2, 3.9])
def test_spin_half(beta):
    assert wigner_d(half, half, half, beta) == pytest.approx(math.cos(beta / 2), abs=1e-15)
    assert wigner_d(half, half, -half, beta) == pytest.approx(-math.sin(beta / 2), abs=1e-15)


@pytest.mark.parametrize("two_j", range(0, 13))
def test_identity_at_zero(two_j):
    np.testing.assert_array_equal(wigner_d_matrix(Fraction(two_j, 2), 0.0), np.eye(two_j + 1))


@pytest.mark.parametrize("two_j", [1, 2, 3, 6, 9, 12])
@pytest.mark.parametrize("beta", [0.3, 1.0, 2.0, math.pi, -0.8])
def test_matches_matrix_exponential(two_j, beta):
    np.testing.assert_allclose(wigner_d_matrix(Fraction(two_j, 2), beta), d_oracle(two_j, beta), atol=1e-12)


@pytest.mark.parametrize("beta", [0.3, 1.0, 2.0])
def test_column_normalization_j6(beta):
    col = [wigner_d(6, m, 0, beta) for m in range(-6, 7)]
    assert math.fsum(c * c for c in col) == pytest.approx(1.0, abs=1e-13)


@settings(max_examples=40)
@given(st.integers(0, 16), st.floats(-2 * math.pi, 2 * math.pi))
def test_d_orthogonality_and_symmetry(two_j, beta):
    d = wigner_d_matrix(Fraction(two_j, 2), beta)
    assert np.abs(d.T @ d - np.eye(two_j + 1)).max() <= 1e-10
    two_m = np.arange(-two_j, two_j + 1, 2)
    sign = (-1.0) ** ((two_m[:, None] - two_m[None, :]) // 2)
    assert np.abs(d - sign * d.T).max() <= 1e-12


@pytest.mark.parametrize("two_j", [19, 20, 21, 40, 80])
def test_large_j_stays_orthogonal(two_j):
    d = wigner_d_matrix(Fraction(two_j, 2), 1.3)
    assert np.abs(d.T @ d - np.eye(two_j + 1)).max() <= 1e-12


def test_large_j_matches_matrix_exponential():
    np.testing.assert_allclose(wigner_d_matrix(15, 2.1), d_oracle(30, 2.1), atol=1e-11)


def test_large_j_clebsch_gordan_unitary():
    tja, tjb = 24, 22
    for tm in (0, 6):
        rows = [(ma, tm - ma) for ma in range(-tja, tja + 1, 2) if abs(tm - ma) <= tjb]
        cols = [tj for tj in range(abs(tja - tjb), tja + tjb + 1, 2) if tj >= abs(tm)]
        u = np.array([[clebsch_gordan(Fraction(tja, 2), Fraction(ma, 2), Fraction(tjb, 2), Fraction(mb, 2),
                                      Fraction(tj, 2), Fraction(tm, 2)) for tj in cols] for ma, mb in rows])
        assert np.abs(u.T @ u - np.eye(len(cols))).max() <= 1e-12


def test_wigner_d_rejects_bad_labels():
    with pytest.raises(DomainError):
        wigner_d(1, 2, 0, 0.1)
    with pytest.raises(DomainError):
        wigner_d(1, half, 0, 0.1)


def test_clebsch_gordan_examples():
    assert clebsch_gordan(half, half, half, half, 1, 1) == pytest.approx(1.0, abs=1e-15)
    assert clebsch_gordan(half, half, half, -half, 0, 0) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert clebsch_gordan(half, -half, half, half, 0, 0) == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
    assert clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0
    with pytest.raises(DomainError):
        clebsch_gordan(1, 0, 1, 0, 3, 0)


def _labels(two_j):
    return [Fraction(t, 2) for t in range(-two_j, two_j + 1, 2)]


@pytest.mark.parametrize("tja,tjb", [(1, 1), (2, 1), (2, 2), (3, 4), (6, 6), (5, 2)])
def test_clebsch_gordan_matches_sympy(tja, tjb):
    ja, jb = Fraction(tja, 2), Fraction(tjb, 2)
    r = lambda x: Rational(x.numerator, x.denominator)
    for tj in range(abs(tja - tjb), tja + tjb + 1, 2):
        j = Fraction(tj, 2)
        for m in _labels(tj):
            for ma in _labels(tja):
                mb = m - ma
                if abs(mb) > jb:
                    continue
                expected = float(CG(r(ja), r(ma), r(jb), r(mb), r(j), r(m)).doit())
                assert clebsch_gordan(ja, ma, jb, mb, j, m) == pytest.approx(expected, abs=1e-13)


def test_clebsch_gordan_completeness_j3():
    for j in range(0, 7):
        for m in range(-j, j + 1):
            total = sum(clebsch_gordan(3, ma, 3, m - ma, j, m) ** 2 for ma in range(-3, 4) if abs(m - ma) <= 3)
            assert total == pytest.approx(1.0, abs=1e-12)


def test_coupled_singlet(square):
    c = coupled_state(square, 0, 0).grid()
    for k in range(7):
        for l in range(7):
            expected = (-1) ** k / math.sqrt(7) if k + l == 6 else 0.0
            assert c[k, l] == pytest.approx(expected, abs=1e-14)


def test_coupled_stretched(square):
    c = coupled_state(square, 6, 6)
    assert abs(c.grid()[6, 6]) == pytest.approx(1.0, abs=1e-14)


def test_coupled_symmetric_amplitudes(square):
    c = coupled_state(square, 6, 0).grid()
    expected = np.array([math.sqrt(math.comb(6, k) * math.comb(6, 6 - k)) for k in range(7)])
    expected /= np.linalg.norm(expected)
    np.testing.assert_allclose([c[k, 6 - k] for k in range(7)], expected, atol=1e-14)
    # the unnormalized closed form sqrt(C(N,N/2)) * C(N/2,k) is off by a global factor
    printed = np.array([math.sqrt(math.comb(12, 6)) * math.comb(6, k) for k in range(7)])
    assert np.linalg.norm(printed) != pytest.approx(1.0)
    np.testing.assert_allclose(printed / np.linalg.norm(printed), expected, atol=1e-14)


@pytest.mark.parametrize("shape", [LatticeShape(6, 6), LatticeShape(3, 4), LatticeShape(0, 5), LatticeShape(2, 2)])
def test_coupled_basis_orthonormal(shape):
    labels, basis = coupled_basis(shape)
    assert len(labels) == shape.n_sites
    assert np.abs(basis.T @ basis - np.eye(shape.n_sites)).max() <= 1e-10


def test_coupled_state_domain(square):
    with pytest.raises(DomainError):
        coupled_state(LatticeShape(6, 2), 1, 0)
    with pytest.raises(DomainError):
        coupled_state(square, 2, 3)


def test_isospecific_evolution_preserves_j(square):
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA, 0.7 * OMEGA)))
    labels = coupled_labels(square)
    states = {s: coupled_state(square, Fraction(s.two_j, 2), Fraction(s.two_m, 2)) for s in labels}
    for s in labels:
        out = evolve(prop, states[s], 11.0)
        for o in labels:
            if o.two_j != s.two_j:
                assert abs(states[o].overlap(out)) <= 1e-9


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("u", [0.0, 0.2, -3.0])
def test_singlet_is_stationary(n, u):
    shape = LatticeShape(n, n)
    singlet = coupled_state(shape, 0, 0)
    prop = decompose(build_hamiltonian(shape, ModelParams.isospecific(OMEGA, u)))
    for t in (1.0, T_SPLIT, 40.0):
        assert singlet.fidelity(evolve(prop, singlet, t)) >= 1 - 1e-10


def test_jz_moment_matches_imbalance(square):
    prop = decompose(build_hamiltonian(square, ModelParams.isospecific(OMEGA, 0.3 * OMEGA)))
    out = evolve(prop, AmplitudeField.fock(square, 6, 0), T_SPLIT)
    dist = imbalance_distribution(out)
    for order in (1, 2, 3):
        assert jz_moment(out, order) == pytest.approx(float(np.dot(dist.m**order, dist.probs)), abs=1e-9)


def test_analytic_identity_at_zero(square, free_params):
    a, b = FockLabel(2, 5), FockLabel(4, 1)
    assert analytic_probability(square, free_params, a, a, 0.0) == 1.0
    assert analytic_probability(square, free_params, a, b, 0.0) == 0.0
    assert analytic_amplitude(square, free_params, a, a, 0.0) == 1.0


def test_perfect_transfer_closed_form():
    shape = LatticeShape(0, 12)
    params = ModelParams(0.0, OMEGA)
    p = analytic_probability(shape, params, FockLabel(0, 12), FockLabel(0, 0), math.pi / OMEGA)
    assert p == pytest.approx(1.0, abs=1e-14)


def test_analytic_requires_free(square):
    with pytest.raises(DomainError):
        analytic_probability(square, ModelParams.isospecific(OMEGA, 0.1), FockLabel(0, 0), FockLabel(0, 0), 1.0)


def test_analytic_amplitude_matches_propagator():
    rng = np.random.default_rng(11)
    shape = LatticeShape(3, 4)
    params = ModelParams(OMEGA, 1.4 * OMEGA)
    prop = decompose(build_hamiltonian(shape, params))
    for _ in range(10):
        t = rng.uniform(0, 60)
        u = prop.unitary(t)
        k0, l0 = rng.integers(0, 4), rng.integers(0, 5)
        total = 0.0
        for lab in shape.labels():
            amp = analytic_amplitude(shape, params, FockLabel(k0, l0), lab, t)
            assert abs(amp - u[shape.index(lab.k, lab.l), shape.index(k0, l0)]) <= 1e-9
            total += abs(amp) ** 2
        assert total == pytest.approx(1.0, abs=1e-12)


def test_convolution_examples():
    delta_a = np.zeros(5)
    delta_a[1] = 1
    delta_b = np.zeros(4)
    delta_b[3] = 1
    out = imbalance_convolution(delta_a, delta_b)
    assert out.probs.tolist() == [0, 0, 0, 0, 1, 0, 0, 0]
    b6 = np.array([math.comb(6, i) for i in range(7)]) / 64
    b12 = np.array([math.comb(12, i) for i in range(13)]) / 4096
    np.testing.assert_allclose(imbalance_convolution(b6, b6).probs, b12, atol=1e-15)
    with pytest.raises(DomainError):
        imbalance_convolution([0.5, 0.4], b6)


def test_analytic_imbalance_matches_lattice(square, free_params):
    prop = decompose(build_hamiltonian(square, free_params))
    for k, l in [(3, 3), (6, 0), (1, 4)]:
        numeric = imbalance_distribution(evolve(prop, AmplitudeField.fock(square, k, l), T_SPLIT))
        exact = analytic_imbalance(square, free_params, FockLabel(k, l), T_SPLIT)
        np.testing.assert_allclose(exact.probs, numeric.probs, atol=1e-12)
