"""Qubit decoherence in canonical and microcanonical oscillator baths."""

__version__ = "0.1.0"

from .bath import (  # noqa: E402
    CurrentProfile,
    LineSpec,
    ModeSet,
    Ohmic,
    Tabulated,
    current_fourier,
    current_power,
    ladder_modes,
    n_eff_si,
    ohmic_ladder,
    spectral_density_from_modes,
    transmission_line_modes,
    uniform_coupling,
)
from .errors import (  # noqa: E402
    ConfigError,
    DecomcError,
    DegenerateFit,
    NonConvergence,
    QuadratureFailure,
    ShellTooLarge,
    TruncationError,
)
from .fock import (  # noqa: E402
    DisplacementSet,
    ExactShell,
    FockState,
    WindowShell,
    coherence_exact_canonical,
    coherence_exact_microcanonical,
    diagonal_overlaps,
    displacement_amplitudes,
    enumerate_shell,
    enumerate_window,
)
from .microcanonical import (  # noqa: E402
    ContourSpec,
    MicroCoherence,
    coherence_contour,
    coherence_micro_saddle,
    coherence_ohmic,
    coherence_saddle_corrected,
    normalization,
    saddle_shift,
)
from .thermal import (  # noqa: E402
    DecoherenceExponent,
    canonical_exponent,
    free_green_fourier,
    hermitean_part_dispersion,
    q_beta_derivatives,
    q_complex,
    q_discrete,
    q_imag_continuum,
    q_large_t,
    q_ohmic_closed,
    q_ohmic_exact,
    q_r_continuum,
)
from .thermo import (  # noqa: E402
    Line1D,
    TabulatedLogZ,
    ThermoPoint,
    Volume3D,
    beta_from_n_eff,
    continuum_log_partition,
    energy,
    log_partition,
    n_eff,
    scaling_exponent_fit,
    solve_beta,
    thermo_derivatives,
)
