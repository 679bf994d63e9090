"""
Total-spin states on the two-species lattice
============================================

Each species is a spin of length n/2.  Coupling the two spins with
Clebsch-Gordan coefficients gives states spread over one antidiagonal of
the lattice.  The fully symmetric one moves like a single species; the
singlet does not move at all.
"""

import math

import numpy as np

import bjjsim as bj

omega = bj.FUSED_SILICA.omega
T = math.pi / (2 * omega)
square = bj.LatticeShape(6, 6)

symmetric = bj.coupled_state(square, 6, 0)
singlet = bj.coupled_state(square, 0, 0)
print("|6,0> amplitudes on k+l=6:", np.round([symmetric.grid()[k, 6 - k].real for k in range(7)], 4))
print("|0,0> amplitudes on k+l=6:", np.round([singlet.grid()[k, 6 - k].real for k in range(7)], 4))

###############################################################################
# Compare with six-plus-six bosons of one species under interactions.

for u in (0.0, 0.125, 1.0):
    params = bj.ModelParams.isospecific(omega, u * omega)
    line = bj.LatticeShape(0, 12)
    one = bj.evolve(bj.decompose(bj.build_hamiltonian(line, params)), bj.AmplitudeField.fock(line, 0, 6), T)
    prop = bj.decompose(bj.build_hamiltonian(square, params))
    two = bj.evolve(prop, symmetric, T)
    still = bj.evolve(prop, singlet, T)
    gap = np.abs(bj.imbalance_distribution(one).probs - bj.imbalance_distribution(two).probs).max()
    print(f"U/omega={u:5.3f}  |6,0> vs one species: {gap:.1e}   singlet fidelity: {singlet.fidelity(still):.12f}")

###############################################################################
# A few Wigner d-functions and Clebsch-Gordan coefficients.

print("d^{1/2}_{1/2,-1/2}(1.0) =", bj.wigner_d(0.5, 0.5, -0.5, 1.0), "=", -math.sin(0.5))
print("<1/2 1/2; 1/2 -1/2 | 0 0> =", bj.clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0))
