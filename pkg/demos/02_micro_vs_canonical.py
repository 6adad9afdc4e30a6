"""
Fixed energy versus fixed temperature
=====================================

A bath prepared in a single energy shell decoheres the qubit slightly
differently from a thermal bath at the matching temperature. The gap
shrinks like 1/N_eff, with N_eff = E beta the number of thermally
populated modes.
"""

import numpy as np

from decomc import (
    ContourSpec,
    CurrentProfile,
    Line1D,
    coherence_contour,
    coherence_micro_saddle,
    coherence_ohmic,
    energy,
    ohmic_ladder,
    thermo_derivatives,
)

# %%
# An Ohmic-weighted ladder at beta = 1. Shrinking the spacing omega0 adds
# modes below the thermal energy, so N_eff = pi^2 / (6 beta omega0) grows
# while the spectral density stays fixed. The one-period contour gives the
# exact shell average; the saddle formula predicts the leading gap.

eta, beta = 0.2, 1.0
profile = CurrentProfile(2.0, 5.0)
print(f"{'N_eff':>7} {'|C_micro - C_thermal|':>22} {'saddle prediction':>18}")
for target in (5, 10, 20, 40):
    w0 = np.pi**2 / (6 * beta * target)
    modes = ohmic_ladder(w0, int(np.ceil(40 / w0)), eta)
    E = round(energy(modes, beta) / w0) * w0
    exact = coherence_contour(modes, profile, E, ContourSpec(mode="period"))
    saddle = coherence_micro_saddle(modes, modes, profile, E)
    print(f"{exact.n_eff:7.2f} {abs(exact.c - exact.c_thermal):22.3e} "
          f"{abs(saddle.c - exact.c_thermal):18.3e}")

# %%
# A one-dimensional line has C_V = 2 N_eff proportional to T. At N_eff = 10
# and eta t / beta = 1 both corrections are 2.5% of the thermal exponent.

line = Line1D(length=60.0, speed=np.pi)
tp = thermo_derivatives(line, 1.0)
mc = coherence_ohmic(0.05, 0.0, tp, 20.0)
print(f"N_eff = {tp.n_eff:g}")
print(f"thermal |C| = {abs(mc.c_thermal):.4f}, microcanonical |C| = {abs(mc.c):.4f}")
print(f"prefactor correction {mc.preexp_correction:+.4f}, "
      f"exponent correction {mc.exponent_correction:+.4f}")
