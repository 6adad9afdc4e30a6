"""
How many modes does a cold line populate?
=========================================

A superconducting line of length L at temperature T holds about
k_B T L / (pi hbar c) thermal quanta. For a metre at 100 mK this is close
to ten, which is the scale where 1/N_eff corrections are visible.
"""

import numpy as np

from decomc import (
    CurrentProfile,
    LineSpec,
    beta_from_n_eff,
    n_eff_si,
    q_beta_derivatives,
    saddle_shift,
    thermo_derivatives,
    transmission_line_modes,
    uniform_coupling,
)

for L, T in ((1.0, 0.1), (2.0, 0.05), (0.1, 0.02)):
    print(f"L = {L:4.1f} m, T = {T:5.3f} K: N_eff = {n_eff_si(L, T):6.2f}")

# %%
# In natural units a line of 200 quarter-wave modes behaves like the
# continuum once the thermal energy sits well below the top mode.

spec = LineSpec(length=1.0, speed=1.0, n_modes=200)
modes = transmission_line_modes(spec, uniform_coupling(0.05))
beta = beta_from_n_eff(modes, 14.0)
tp = thermo_derivatives(modes, beta)
print(f"beta = {beta:.4f}, C_V / (2 N_eff) = {tp.C_V / (2 * tp.n_eff):.4f}")

# %%
# The coupling shifts the saddle point off the real inverse-temperature
# axis by i Q_beta beta^2 / C_V.

q, dq, _ = q_beta_derivatives(modes, CurrentProfile(3.0, 40.0), beta)
print(f"Q = {q:.5f}, saddle shift = {saddle_shift(dq, tp.C_V, beta):.3e}")
