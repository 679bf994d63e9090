"""
From couplings to waveguide positions
=====================================

Laser-written waveguides couple with a strength that decays exponentially
with their separation.  Inverting that law along both axes places the 49
waveguides of the 7 x 7 lattice; the unwanted diagonal neighbours are then
estimated from their Euclidean distance.
"""

import numpy as np

import bjjsim as bj
from bjjsim.photonics import diagonal_ratios

preset = bj.FUSED_SILICA
square = bj.LatticeShape(6, 6)
params = bj.ModelParams.isospecific(preset.omega)

layout = bj.build_layout(square, params, preset.law_a, preset.law_b)
print("row positions y (um):   ", np.round(layout.y, 2))
print("column positions x (um):", np.round(layout.x, 2))
print("spacings along y:", np.round(layout.y_gaps, 2))

ratios = diagonal_ratios(layout)
print(f"diagonal / straight coupling: mean {ratios.mean():.3f}, range {ratios.min():.3f}-{ratios.max():.3f}")

###############################################################################
# Halving the tunneling rate (a longer sample) pushes the waveguides apart
# and the parasitic diagonal coupling falls faster than the wanted one.

wide = bj.build_layout(square, bj.ModelParams.isospecific(preset.omega / 2), preset.law_a, preset.law_b)
print(f"at omega/2: mean ratio {diagonal_ratios(wide).mean():.3f}")

###############################################################################
# The layout and the diagonal couplings as CSV, ready for a mask designer.

print(layout.to_csv().splitlines()[:4])
