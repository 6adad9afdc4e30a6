"""Fixed-energy bath states: normalisation, coherence and 1/N_eff corrections.

The microcanonical average is written as an integral over a complex
inverse temperature ``z = beta - i s`` running horizontally through the
saddle point of ``E z + ln Z(z)``. Two quadrature modes exist:

* ``"period"``: one period ``s in [-pi/w0, pi/w0)`` for a commensurate
  ladder. The integrand is then a trigonometric polynomial times rapidly
  decaying harmonics, so the trapezoid rule reproduces exact shell counting.
* ``"line"``: a truncated line of ``+-S`` saddle widths, checked by doubling.

Prefactor conventions cancel in every coherence ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .bath import CurrentProfile, ModeSet
from .errors import NonConvergence
from .thermal import q_complex
from .thermo import ThermoPoint, log_partition, solve_beta, thermo_derivatives


@dataclass(frozen=True)
class ContourSpec:
    """Quadrature settings for the inverse-temperature contour.

    ``half_width`` is measured in saddle widths ``beta / sqrt(C_V)``;
    ``beta_anchor=None`` places the contour at ``solve_beta(E)``.
    ``window`` optionally damps the line integrand by a Gaussian of that
    many saddle widths (for spectra whose integrand never decays). The
    damping smears the shell over an energy width of about
    ``sqrt(C_V) / (window * beta)``, pulling results towards the canonical
    value, so it should be kept wide (tens of widths).
    """

    beta_anchor: Optional[float] = None
    half_width: float = 12.0
    n_points: int = 2048
    mode: str = "line"
    omega0: Optional[float] = None
    window: Optional[float] = None
    rtol: float = 1e-8

    def __post_init__(self):
        if self.n_points < 64:
            raise ValueError("n_points must be >= 64")
        if self.mode not in ("line", "period"):
            raise ValueError(f"unknown contour mode {self.mode!r}")
        if self.mode == "line" and self.half_width < 6:
            raise ValueError("half_width must be >= 6 saddle widths")
        if self.beta_anchor is not None and not self.beta_anchor > 0:
            raise ValueError("beta_anchor must be positive")


@dataclass(frozen=True)
class MicroCoherence:
    """Microcanonical coherence and, for the saddle methods, its corrections.

    ``preexp_correction`` and ``exponent_correction`` are NaN for the
    contour method, which does not split the result.
    """

    c: complex
    q_thermal: complex
    preexp_correction: float
    exponent_correction: float
    n_eff: float
    method: str  # "contour" | "saddle-corrected" | "ohmic-closed"

    @property
    def c_thermal(self) -> complex:
        return complex(np.exp(-self.q_thermal))


# --- contour quadrature --------------------------------------------------


def _anchor(bath, E, contour: ContourSpec) -> float:
    return contour.beta_anchor if contour.beta_anchor is not None else solve_beta(bath, E)


def _period(bath, E, contour):
    if not isinstance(bath, ModeSet):
        raise ValueError("one-period contour needs a discrete ModeSet")
    w0 = contour.omega0 or float(bath.frequencies[0])
    units = bath.frequencies / w0
    if not np.allclose(units, np.rint(units), rtol=0, atol=1e-9):
        raise ValueError("one-period contour needs a commensurate spectrum")
    if not math.isclose(E / w0, round(E / w0), abs_tol=1e-9):
        raise ValueError("E must be an exact shell energy M * omega0")
    return w0


def _grid(bath, E, contour: ContourSpec, beta, scale=1):
    if contour.mode == "period":
        w0 = _period(bath, E, contour)
        # harmonics down to -M must not alias onto the shell
        n = max(contour.n_points, 4 * int(round(E / w0)) + 64) * scale
        s = (np.arange(n) - n // 2) * (2 * np.pi / (w0 * n))
        weights = np.full(n, 1.0 / (w0 * n))  # (1/2pi) * ds
        return s, weights
    C_V = thermo_derivatives(bath, beta).C_V
    width = beta / math.sqrt(C_V)
    half = contour.half_width * width * scale
    n = contour.n_points * scale + 1
    s = np.linspace(-half, half, n)
    weights = np.full(n, (s[1] - s[0]) / (2 * np.pi))
    weights[[0, -1]] *= 0.5
    if contour.window is not None:
        weights = weights * np.exp(-0.5 * (s / (contour.window * width)) ** 2)
    return s, weights


def _integrals(bath, E, contour, beta, q_source, profile, scale=1):
    """Scaled normalisation and coherence numerator on one grid."""
    s, wts = _grid(bath, E, contour, beta, scale)
    z = beta - 1j * s
    f0 = E * beta + float(log_partition(bath, beta))
    base = np.exp(E * z + log_partition(bath, z) - f0)
    den = np.sum(wts * base)
    if profile is None:
        return den, None, f0
    q = q_complex(q_source, profile, z)
    num = np.sum(wts * base * np.exp(-q))
    return den, num, f0


def normalization(
    bath, E: float, contour: Optional[ContourSpec] = None, method: str = "contour"
) -> float:
    """``(1/2pi) int ds exp(E z + ln Z(z))`` along ``z = beta - i s``.

    ``method``:

    * ``"contour"``: direct quadrature. In period mode the result is
      ``(number of shell states) / omega0``.
    * ``"saddle"``: steepest descent, ``beta / sqrt(2 pi C_V) exp(E beta + ln Z)``.
    * ``"saddle-literal"``: ``beta sqrt(2 pi / C_V) exp(E beta + ln Z)``,
      larger than the steepest-descent value by exactly 2 pi.
    """
    contour = contour or ContourSpec()
    if not E > 0 and not (contour.mode == "period" and E == 0):
        raise ValueError("E must be positive")
    if method in ("saddle", "saddle-literal"):
        beta = solve_beta(bath, E)
        tp = thermo_derivatives(bath, beta)
        pref = beta / math.sqrt(2 * math.pi * tp.C_V)
        if method == "saddle-literal":
            pref *= 2 * math.pi
        return pref * math.exp(E * beta + tp.logZ)
    if method != "contour":
        raise ValueError(f"unknown method {method!r}")
    if contour.mode == "period" and E == 0:
        _period(bath, E, contour)
        # only the vacuum sits at zero energy
        return 1.0 / (contour.omega0 or float(bath.frequencies[0]))
    beta = _anchor(bath, E, contour)
    den, _, f0 = _integrals(bath, E, contour, beta, None, None)
    if contour.mode == "line":
        den2, _, _ = _integrals(bath, E, contour, beta, None, None, scale=2)
        if abs(den2 - den) > contour.rtol * abs(den2):
            raise NonConvergence(f"contour tail test failed: {den} vs {den2}")
    return float(np.real(den)) * math.exp(f0)


def coherence_contour(
    bath,
    profile: CurrentProfile,
    E: float,
    contour: Optional[ContourSpec] = None,
    q_source=None,
) -> MicroCoherence:
    """Microcanonical coherence by direct contour quadrature.

    ``bath`` supplies ``ln Z``; ``q_source`` (default: ``bath``) supplies the
    continued decoherence exponent. ``E = 0`` on a ladder is the vacuum.
    """
    contour = contour or ContourSpec()
    q_source = bath if q_source is None else q_source
    if E == 0:
        if not isinstance(bath, ModeSet):
            raise ValueError("E = 0 is only defined for a discrete bath")
        q0 = complex(q_complex(q_source, profile, 1e6 / bath.frequencies[0]))
        return MicroCoherence(np.exp(-q0), q0, math.nan, math.nan, 0.0, "contour")
    beta = _anchor(bath, E, contour)
    den, num, _ = _integrals(bath, E, contour, beta, q_source, profile)
    c = num / den
    if contour.mode == "line":
        den2, num2, _ = _integrals(bath, E, contour, beta, q_source, profile, scale=2)
        c2 = num2 / den2
        if abs(c2 - c) > contour.rtol * abs(c2):
            raise NonConvergence(f"contour doubling changed C by {abs(c2 - c):.3g}")
        c = c2
    q_thermal = complex(q_complex(q_source, profile, beta))
    return MicroCoherence(complex(c), q_thermal, math.nan, math.nan, E * beta, "contour")


# --- saddle-point corrections --------------------------------------------


def saddle_shift(dQ_dbeta, C_V: float, beta: float) -> complex:
    """Shift of the saddle in ``xi`` caused by the coupling.

    With ``d/dxi = -i d/dbeta`` at ``xi = i beta`` and ``f0'' = -C_V/beta^2``,
    the shift ``Q'/f0''`` equals ``i Q_beta beta^2 / C_V``.
    """
    if not C_V > 0:
        raise ValueError("C_V must be positive")
    return 1j * dQ_dbeta * beta**2 / C_V


def coherence_saddle_corrected(q, dq, d2q, thermo: ThermoPoint) -> MicroCoherence:
    """Leading 1/C_V correction to the thermal coherence.

    ``C = {1 + (1/2) d/dbeta (Q_b/f_bb)} exp{-Q - Q_b^2 / (2 f_bb)}`` with
    ``f_bb = C_V / beta^2``; the bracket derivative brings in ``Q_bb``,
    ``C_V`` and ``dC_V/dT``.
    """
    C_V, beta = thermo.C_V, thermo.beta
    if not C_V > 0:
        raise ValueError("C_V must be positive")
    # d/dbeta (dq beta^2 / C_V), with dC_V/dbeta = -dCv_dT / beta^2
    bracket = (beta**2 * d2q + 2 * beta * dq) / C_V + dq * thermo.dCv_dT / C_V**2
    pre = 0.5 * bracket
    expo = -0.5 * dq**2 * beta**2 / C_V
    c = (1 + pre) * np.exp(-q + expo)
    return MicroCoherence(
        complex(c), complex(q), float(np.real(pre)), float(np.real(expo)),
        thermo.n_eff, "saddle-corrected",
    )


def coherence_ohmic(eta: float, deta_dT: float, thermo: ThermoPoint, t: float) -> MicroCoherence:
    """Ohmic bath in the ``t >> beta`` regime (caller's responsibility).

    ``C = {1 + (t / 2 beta^2) d/dT(eta/C_V)} exp{-eta t/beta - eta^2 t^2/(2 beta^2 C_V)}``.
    """
    C_V, beta = thermo.C_V, thermo.beta
    if not C_V > 0:
        raise ValueError("C_V must be positive")
    d_ratio = deta_dT / C_V - eta * thermo.dCv_dT / C_V**2
    pre = t / (2 * beta**2) * d_ratio
    q = eta * t / beta
    expo = -(eta**2) * t**2 / (2 * beta**2 * C_V)
    c = (1 + pre) * math.exp(-q + expo)
    return MicroCoherence(complex(c), complex(q), pre, expo, thermo.n_eff, "ohmic-closed")


def coherence_micro_saddle(bath, q_source, profile: CurrentProfile, E: float) -> MicroCoherence:
    """Saddle-corrected coherence with beta from ``solve_beta`` on the same bath."""
    from .thermal import q_beta_derivatives

    beta = solve_beta(bath, E)
    tp = thermo_derivatives(bath, beta)
    q, dq, d2q = q_beta_derivatives(q_source, profile, beta)
    return coherence_saddle_corrected(q, dq, d2q, tp)


def with_anchor(contour: ContourSpec, beta: float) -> ContourSpec:
    return replace(contour, beta_anchor=beta)
