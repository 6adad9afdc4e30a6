"""
Thermal decoherence of a switched qubit
=======================================

A qubit whose gate drives a current through an Ohmic bath loses coherence
``|C| = exp(-Q_R)``. Here the exponent is evaluated three ways and the
long-time law ``Q_R ~ eta t / beta`` is read off.
"""

import numpy as np

from decomc import CurrentProfile, Ohmic, q_ohmic_closed, q_ohmic_exact, q_r_continuum

eta, beta, omega_r = 0.1, 1.0, 100.0

# %%
# Quadrature, the finite-cutoff Gamma-function form and the sharp-cutoff
# closed form. The first two agree to rounding; the closed form drops
# terms of order 1/(beta omega_r) inside the thermal logarithm.

print(f"{'t':>6} {'quadrature':>14} {'gamma form':>14} {'closed form':>14}")
for t in (0.5, 1.0, 2.0, 5.0, 20.0):
    p = CurrentProfile(t, omega_r)
    quad = q_r_continuum(Ohmic(eta), p, beta)
    exact = q_ohmic_exact(eta, beta, omega_r, t)
    closed = q_ohmic_closed(eta, beta, omega_r, t)[0]
    print(f"{t:6.1f} {quad:14.10f} {exact:14.10f} {closed:14.10f}")

# %%
# At long times the vacuum logarithm saturates and the thermal part grows
# linearly with slope eta / beta.

for t in (10.0, 100.0, 500.0):
    q = q_r_continuum(Ohmic(eta), CurrentProfile(t, omega_r), beta)
    thermal = q - eta / (2 * np.pi) * np.log1p((omega_r * t) ** 2)
    print(f"t = {t:5.0f}: thermal part / (eta t / beta) = {thermal * beta / (eta * t):.4f}")
