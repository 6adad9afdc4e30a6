"""
Checking the contour against brute force
========================================

For a few commensurate modes every state of an energy shell can be listed.
Averaging the diagonal displacement matrix elements over the shell gives an
answer that shares no code with the contour integral.
"""

from decomc import (
    ContourSpec,
    CurrentProfile,
    coherence_contour,
    coherence_exact_canonical,
    coherence_exact_microcanonical,
    enumerate_shell,
    ladder_modes,
    q_discrete,
)

modes = ladder_modes(1.0, 8, 0.1)
profile = CurrentProfile(2.0, 20.0)

# %%
# Shell sizes are partition numbers: p(5) = 7.

for M in (5, 12, 20):
    print(f"M = {M:2d}: {len(enumerate_shell(modes, M)):4d} states")

# %%
# Contour quadrature over one period versus the explicit shell average.

for M in (5, 12, 20):
    exact = coherence_exact_microcanonical(modes, profile, M)
    contour = coherence_contour(modes, profile, float(M), ContourSpec(mode="period")).c
    print(f"M = {M:2d}: |difference| = {abs(exact - contour):.1e}")

# %%
# The thermal state works the same way, with Bose weights per mode.

beta = 0.7
fock = coherence_exact_canonical(modes, profile, beta)
direct = q_discrete(modes, profile, beta).coherence
print(f"canonical: Fock sum {fock:.12f}, exp(-Q) {direct:.12f}")
