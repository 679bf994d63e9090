"""Built-in acceptance suite.

Each check reproduces one headline property of the simulator at a fixed
tolerance and returns a :class:`CheckResult`; ``run_all`` is what the
``check`` command and ``tests/test_acceptance.py`` execute.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .angular import (
    analytic_probability,
    clebsch_gordan,
    coupled_labels,
    coupled_state,
    imbalance_convolution,
    wigner_d_matrix,
)
from .lattice import FockLabel, LatticeShape, ModelParams, build_hamiltonian
from .observables import (
    imbalance_distribution,
    odd_suppression_metric,
    sign_flip_check,
    variance_imbalance,
)
from .photonics import FUSED_SILICA, build_layout, diagonal_overlay, diagonal_ratios
from .propagation import AmplitudeField, decompose, evolve, evolve_trajectory

OMEGA = FUSED_SILICA.omega
T_SPLIT = math.pi / (2 * OMEGA)
SINGLE = LatticeShape(0, 12)
SQUARE = LatticeShape(6, 6)
STARTS = {
    "single": (SINGLE, (0, 6)),
    "mixed": (SQUARE, (3, 3)),
    "separated": (SQUARE, (6, 0)),
}


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _final(shape, params, initial, t=T_SPLIT, overlay=None):
    prop = decompose(build_hamiltonian(shape, params, diagonal=overlay))
    return evolve(prop, initial, t)


def _start_dist(start, u_over_omega=0.0, overlay=None):
    shape, (k, l) = STARTS[start]
    params = ModelParams.isospecific(OMEGA, u_over_omega * OMEGA)
    return imbalance_distribution(_final(shape, params, AmplitudeField.fock(shape, k, l), overlay=overlay))


def hom_parity() -> CheckResult:
    dist = _start_dist("single")
    odd = odd_suppression_metric(dist)
    top = dist.m[dist.probs >= dist.probs.max() - 1e-12]
    ok = odd <= 1e-10 and set(np.abs(top).tolist()) == {6.0}
    return CheckResult(1, "HOM parity suppression", ok, f"odd weight {odd:.2e}, maxima at m={top.tolist()}")


def variance_triple() -> CheckResult:
    expected = {"single": 21.0, "mixed": 12.0, "separated": 3.0}
    got = {k: variance_imbalance(_start_dist(k)) for k in expected}
    ok = all(abs(got[k] - v) <= 1e-8 for k, v in expected.items())
    return CheckResult(2, "variance triple 21/12/3", ok, ", ".join(f"{k}={v:.12f}" for k, v in got.items()))


def separated_binomial() -> CheckResult:
    dist = _start_dist("separated")
    binom = np.array([math.comb(12, i) for i in range(13)]) / 2**12
    err = np.abs(dist.probs - binom).max()
    return CheckResult(3, "separated-state binomial", err <= 1e-10, f"max deviation {err:.2e}")


def convolution_identity() -> CheckResult:
    mixed = _start_dist("mixed")
    shape = LatticeShape(0, 6)
    half = imbalance_distribution(_final(shape, ModelParams.isospecific(OMEGA), AmplitudeField.fock(shape, 0, 3)))
    err = np.abs(imbalance_convolution(half, half).probs - mixed.probs).max()
    return CheckResult(4, "mixed = single(N=6) * single(N=6)", err <= 1e-10, f"max deviation {err:.2e}")


def analytic_numeric(seed: int = 20240611) -> CheckResult:
    rng = np.random.default_rng(seed)
    params = ModelParams.isospecific(OMEGA)
    prop = decompose(build_hamiltonian(SQUARE, params))
    worst = 0.0
    for _ in range(50):
        k0, l0, k, l = rng.integers(0, 7, size=4).tolist()
        t = float(rng.uniform(0, 4 * math.pi / OMEGA))
        numeric = abs(prop.unitary(t)[SQUARE.index(k, l), SQUARE.index(k0, l0)]) ** 2
        exact = analytic_probability(SQUARE, params, FockLabel(k0, l0), FockLabel(k, l), t)
        worst = max(worst, abs(numeric - exact))
    return CheckResult(5, "closed-form vs numerical probabilities", worst <= 1e-9, f"max deviation {worst:.2e} over 50 tuples")


def perfect_transfer() -> CheckResult:
    prop = decompose(build_hamiltonian(SINGLE, ModelParams.isospecific(OMEGA)))
    start = AmplitudeField.fock(SINGLE, 0, 0)
    transfer = abs(evolve(prop, start, math.pi / OMEGA).amplitudes[SINGLE.index(0, 12)]) ** 2
    revival = start.fidelity(evolve(prop, start, 2 * math.pi / OMEGA))
    ok = transfer >= 1 - 1e-10 and revival >= 1 - 1e-10
    return CheckResult(6, "perfect state transfer and revival", ok, f"1-p(transfer)={1 - transfer:.2e}, 1-F(revival)={1 - revival:.2e}")


def singlet_stationary() -> CheckResult:
    singlet = coupled_state(SQUARE, 0, 0)
    worst = 0.0
    for r in (0.0, 0.125, 1.0):
        out = _final(SQUARE, ModelParams.isospecific(OMEGA, r * OMEGA), singlet)
        worst = max(worst, 1 - singlet.fidelity(out))
    return CheckResult(7, "singlet does not evolve", worst <= 1e-10, f"max 1-F {worst:.2e} for U/omega in (0, 0.125, 1)")


def stretched_equivalence() -> CheckResult:
    times = np.linspace(0, T_SPLIT, 201)
    worst = 0.0
    for r in (0.0, 0.125, 1.0):
        params = ModelParams.isospecific(OMEGA, r * OMEGA)
        one_d = evolve_trajectory(decompose(build_hamiltonian(SINGLE, params)), AmplitudeField.fock(SINGLE, 0, 6), times)
        two_d = evolve_trajectory(decompose(build_hamiltonian(SQUARE, params)), coupled_state(SQUARE, 6, 0), times)
        for a, b in zip(one_d, two_d):
            worst = max(worst, np.abs(imbalance_distribution(a).probs - imbalance_distribution(b).probs).max())
    return CheckResult(8, "|j=6,m=0> mimics one species", worst <= 1e-9, f"max deviation {worst:.2e} over 201 samples")


def sign_symmetry() -> CheckResult:
    overlay = diagonal_overlay(build_layout(SQUARE, ModelParams.isospecific(OMEGA)))
    worst, smallest_dressed = 0.0, math.inf
    for start, (shape, (k, l)) in STARTS.items():
        initial = AmplitudeField.fock(shape, k, l)
        for r in (0.125, 1.0):
            params = ModelParams.isospecific(OMEGA, r * OMEGA)
            worst = max(worst, abs(sign_flip_check(shape, params, initial, T_SPLIT).delta))
            if shape == SQUARE:
                dressed = sign_flip_check(shape, params, initial, T_SPLIT, overlay)
                smallest_dressed = min(smallest_dressed, abs(dressed.delta))
    ok = worst <= 1e-9 and smallest_dressed > 1e-9
    return CheckResult(9, "+U/-U variance symmetry", ok, f"max |delta| {worst:.2e} ideal, min |delta| {smallest_dressed:.3g} with diagonals")


def diagonal_magnitude() -> CheckResult:
    ratio = float(diagonal_ratios(build_layout(SQUARE, ModelParams.isospecific(OMEGA))).mean())
    return CheckResult(10, "diagonal/straight coupling ratio", 0.05 <= ratio <= 0.20, f"mean ratio {ratio:.4f}")


def _centrally_peaked(dist) -> bool:
    p, m = dist.probs, dist.m
    if abs(m[np.argmax(p)]) > 1:
        return False
    centre = p.size // 2
    right = p[centre + 1:]
    left = p[:centre][::-1]
    return bool(np.all(np.diff(right) <= 1e-15) and np.all(np.diff(left) <= 1e-15))


def interaction_localization() -> CheckResult:
    steps = (0.0, 0.125, 0.25, 0.5, 1.0)
    ok, parts = True, []
    for start in ("single", "mixed"):
        variances = [variance_imbalance(_start_dist(start, r)) for r in steps]
        peaked = _centrally_peaked(_start_dist(start, 1.0))
        ok &= bool(np.all(np.diff(variances) < 0)) and peaked
        parts.append(f"{start}: " + "->".join(f"{v:.3f}" for v in variances) + f", peaked={peaked}")
    return CheckResult(11, "interactions localize the imbalance", ok, "; ".join(parts))


def property_suites(seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    failures = []

    params = ModelParams.isospecific(OMEGA, 0.3 * OMEGA)
    prop = decompose(build_hamiltonian(SQUARE, params))
    worst_norm = worst_comp = 0.0
    for _ in range(100):
        c = rng.normal(size=SQUARE.n_sites) + 1j * rng.normal(size=SQUARE.n_sites)
        field = AmplitudeField.from_unnormalized(SQUARE, c)
        t1, t2 = rng.uniform(0, 4 * math.pi / OMEGA, size=2)
        out = evolve(prop, field, t1)
        worst_norm = max(worst_norm, abs(np.vdot(out.amplitudes, out.amplitudes).real - 1))
        chained = evolve(prop, out, t2)
        worst_comp = max(worst_comp, np.abs(chained.amplitudes - evolve(prop, field, t1 + t2).amplitudes).max())
    if worst_norm > 1e-10:
        failures.append(f"unitarity {worst_norm:.2e}")
    if worst_comp > 1e-9:
        failures.append(f"composition {worst_comp:.2e}")

    worst_d = 0.0
    for two_j in range(0, 17):
        for beta in rng.uniform(-math.pi, 2 * math.pi, size=20):
            d = wigner_d_matrix(Fraction(two_j, 2), beta)
            worst_d = max(worst_d, np.abs(d.T @ d - np.eye(two_j + 1)).max())
    if worst_d > 1e-10:
        failures.append(f"d orthogonality {worst_d:.2e}")

    worst_cg = 0.0
    for tja in range(0, 9):
        for tjb in range(0, 9):
            rows = [(ma, mb) for ma in range(-tja, tja + 1, 2) for mb in range(-tjb, tjb + 1, 2)]
            cols = [(tj, tm) for tj in range(abs(tja - tjb), tja + tjb + 1, 2) for tm in range(-tj, tj + 1, 2)]
            u = np.array([[clebsch_gordan(Fraction(tja, 2), Fraction(ma, 2), Fraction(tjb, 2), Fraction(mb, 2),
                                          Fraction(tj, 2), Fraction(tm, 2)) for tj, tm in cols] for ma, mb in rows])
            eye = np.eye(len(rows))
            worst_cg = max(worst_cg, np.abs(u.T @ u - eye).max(), np.abs(u @ u.T - eye).max())
    if worst_cg > 1e-10:
        failures.append(f"CG orthogonality {worst_cg:.2e}")

    labels = coupled_labels(SQUARE)
    basis = {s: coupled_state(SQUARE, Fraction(s.two_j, 2), Fraction(s.two_m, 2)) for s in labels}
    worst_j = 0.0
    for s in [lab for lab in labels if lab.two_m == 0]:
        out = evolve(prop, basis[s], T_SPLIT)
        leak = max(abs(basis[o].overlap(out)) for o in labels if o.two_j != s.two_j)
        worst_j = max(worst_j, leak)
    if worst_j > 1e-9:
        failures.append(f"j leakage {worst_j:.2e}")

    raw = decompose(build_hamiltonian(SQUARE, params, "raw"))
    shifted = decompose(build_hamiltonian(SQUARE, params, "shifted"))
    start = AmplitudeField.fock(SQUARE, 6, 0)
    worst_shift = max(
        np.abs(np.abs(evolve(raw, start, t).amplitudes) ** 2 - np.abs(evolve(shifted, start, t).amplitudes) ** 2).max()
        for t in np.linspace(0, 2 * T_SPLIT, 9)
    )
    if worst_shift > 1e-10:
        failures.append(f"detuning shift {worst_shift:.2e}")

    detail = (
        f"unitarity {worst_norm:.1e}, composition {worst_comp:.1e}, d-orth {worst_d:.1e}, "
        f"CG-orth {worst_cg:.1e}, j-leak {worst_j:.1e}, shift {worst_shift:.1e}"
    )
    return CheckResult(12, "property suites", not failures, detail)


ALL_CHECKS = (
    hom_parity,
    variance_triple,
    separated_binomial,
    convolution_identity,
    analytic_numeric,
    perfect_transfer,
    singlet_stationary,
    stretched_equivalence,
    sign_symmetry,
    diagonal_magnitude,
    interaction_localization,
    property_suites,
)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
