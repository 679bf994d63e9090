"""
Interactions wash out the interference
======================================

On-site interactions detune the waveguides along the antidiagonals.  The
variance of the imbalance at ``T`` drops as ``|U|`` grows, identically for
attractive and repulsive interactions unless diagonal couplings are present.
"""

import numpy as np

import bjjsim as bj
from bjjsim.scenario import preset_config, run_scenario

grid = [-2.0, -1.0, -0.5, -0.125, 0.0, 0.125, 0.5, 1.0, 2.0]
print("U/omega " + " ".join(f"{u:7.3f}" for u in grid))
for start in ("single", "mixed", "separated"):
    config = preset_config(f"sweep-{start}", {"sweep.u_over_omega": grid})
    result = run_scenario(config)
    print(f"{start:9s}" + " ".join(f"{v:7.3f}" for _, v, _ in result.sweep))
    if result.sweep[0][2] is not None:
        print(f"{'+diag':9s}" + " ".join(f"{w:7.3f}" for _, _, w in result.sweep))

###############################################################################
# The same symmetry check on its own.

shape = bj.LatticeShape(6, 6)
omega = bj.FUSED_SILICA.omega
params = bj.ModelParams.isospecific(omega, 0.125 * omega)
start = bj.AmplitudeField.fock(shape, 3, 3)
T = np.pi / (2 * omega)
print(bj.sign_flip_check(shape, params, start, T))
overlay = bj.diagonal_overlay(bj.build_layout(shape, bj.ModelParams.isospecific(omega)))
print(bj.sign_flip_check(shape, params, start, T, overlay))
