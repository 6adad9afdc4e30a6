"""Bath mode structures, switching currents and spectral densities.

Units throughout are hbar = k_B = 1; frequencies are inverse times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.constants as const


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModeSet:
    """Discrete bath: mode frequencies and their coupling amplitudes."""

    frequencies: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        w = _frozen(self.frequencies)
        a = _frozen(self.amplitudes)
        if w.shape != a.shape:
            raise ValueError("frequencies and amplitudes differ in length")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("mode frequencies must be positive and finite")
        if np.any(np.diff(w) <= 0):
            raise ValueError("mode frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "amplitudes", a)

    def __len__(self):
        return self.frequencies.size

    def with_amplitudes(self, amplitudes) -> "ModeSet":
        return ModeSet(self.frequencies, amplitudes)

    def scaled(self, factor: float) -> "ModeSet":
        """Same spectrum with every amplitude multiplied by ``factor``."""
        return ModeSet(self.frequencies, factor * self.amplitudes)


def ladder_modes(omega0: float, n_modes: int, amplitudes=1.0) -> ModeSet:
    """Commensurate ladder ``omega_n = n * omega0`` for n = 1..n_modes."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    w = omega0 * np.arange(1, n_modes + 1)
    return ModeSet(w, np.broadcast_to(np.asarray(amplitudes, float), w.shape))


def ohmic_ladder(omega0: float, n_modes: int, eta: float) -> ModeSet:
    """Ladder whose per-mode weights discretise ``F(w) = eta * w``.

    Each mode carries spectral weight ``pi A_n^2 / (2 w_n) = F(w_n) * omega0``,
    so sums over the ladder approach the Ohmic continuum as omega0 -> 0.
    """
    modes = ladder_modes(omega0, n_modes)
    w = modes.frequencies
    return modes.with_amplitudes(np.sqrt(2.0 * eta * w**2 * omega0 / np.pi))


@dataclass(frozen=True)
class CurrentProfile:
    """Rectangular switching pulse of length ``t`` with ramp cutoff ``omega_r``.

    ``omega_r = inf`` gives the sharp rectangle. ``amplitude`` is a global
    multiplier on the per-mode amplitudes stored in a ModeSet.
    """

    t: float
    omega_r: float = np.inf
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.t >= 0:
            raise ValueError("plateau duration t must be >= 0")
        if not self.omega_r > 0:
            raise ValueError("omega_r must be positive")

    @property
    def tau_r(self) -> float:
        return 2 * np.pi / self.omega_r

    def at(self, t: float) -> "CurrentProfile":
        return CurrentProfile(t, self.omega_r, self.amplitude)


def _cutoff(Omega, omega_r):
    if np.isinf(omega_r):
        return np.ones_like(Omega)
    return np.exp(-np.abs(Omega) / (2 * omega_r))


def current_fourier(profile: CurrentProfile, A_n, Omega):
    """Fourier transform of the switching current for one mode.

    ``(A/(i W)) (exp(i W t) - 1) exp(-|W| / 2 w_r)``, continued to ``A t``
    at ``W = 0``.
    """
    Omega = np.asarray(Omega, dtype=float)
    A = profile.amplitude * np.asarray(A_n, dtype=float)
    t = profile.t
    x = Omega * t
    small = np.abs(x) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        big = np.expm1(1j * x) / (1j * np.where(small, 1.0, Omega))
    # (e^{ix}-1)/(iW) = t (1 + ix/2 - x^2/6 ...)
    series = t * (1 + 0.5j * x - x**2 / 6)
    out = np.where(small, series, big) * _cutoff(Omega, profile.omega_r)
    return A * out


def current_power(profile: CurrentProfile, A_n, Omega):
    """``|J(W)|^2 = A^2 t^2 sinc^2(W t / 2) exp(-|W|/w_r)``, real and even."""
    Omega = np.asarray(Omega, dtype=float)
    A = profile.amplitude * np.asarray(A_n, dtype=float)
    t = profile.t
    s = t * np.sinc(Omega * t / (2 * np.pi))
    return A**2 * s**2 * _cutoff(Omega, profile.omega_r) ** 2


# --- spectral densities ---------------------------------------------------


@dataclass(frozen=True)
class Ohmic:
    """``F(w) = eta * w``."""

    eta: float

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be >= 0")

    def __call__(self, omega):
        return self.eta * np.asarray(omega, dtype=float)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear spectral density on ``omega`` nodes; zero outside."""

    omega: np.ndarray
    values: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        w = _frozen(self.omega)
        f = _frozen(self.values)
        if w.shape != f.shape:
            raise ValueError("omega and values differ in length")
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("tabulated omega must be positive and increasing")
        if np.any(f < 0):
            raise ValueError("spectral density must be non-negative")
        if self.interpolation != "linear":
            raise ValueError(f"unsupported interpolation {self.interpolation!r}")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", f)

    @property
    def empty(self) -> bool:
        return self.omega.size < 2 or not np.any(self.values > 0)

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.omega.size == 0:
            return np.zeros_like(omega)
        return np.interp(omega, self.omega, self.values, left=0.0, right=0.0)


SpectralDensity = Ohmic | Tabulated


def spectral_density_from_modes(
    modes: ModeSet, eps: float, points_per_mode: int = 401, span: float = 8.0
) -> Tabulated:
    """Broaden each discrete mode into a Gaussian of half-width ``eps``.

    Mode n carries total weight ``pi A_n^2 / (2 w_n)``, which makes the
    continuum decoherence integral reproduce the discrete mode sum exactly
    as ``eps -> 0``.
    """
    if not eps > 0:
        raise ValueError("broadening eps must be positive")
    if len(modes) == 0:
        return Tabulated(np.empty(0), np.empty(0))
    w_n = modes.frequencies
    weights = np.pi * modes.amplitudes**2 / (2 * w_n)
    u = np.linspace(-span, span, points_per_mode)
    grid = np.unique(np.concatenate([w + eps * u for w in w_n]))
    grid = grid[grid > 0]
    F = np.zeros_like(grid)
    for w, g in zip(w_n, weights):
        F += g * np.exp(-0.5 * ((grid - w) / eps) ** 2) / (eps * np.sqrt(2 * np.pi))
    return Tabulated(grid, F)


# --- transmission line ----------------------------------------------------


@dataclass(frozen=True)
class LineSpec:
    length: float
    speed: float
    n_modes: int
    boundary: str = "open-closed"

    def __post_init__(self):
        if not self.length > 0 or not self.speed > 0:
            raise ValueError("line length and speed must be positive")
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.boundary != "open-closed":
            raise ValueError(f"unsupported boundary {self.boundary!r}")


CouplingRule = Callable[[np.ndarray, LineSpec], np.ndarray]


def uniform_coupling(amplitude: float = 1.0) -> CouplingRule:
    """Mode-independent ``A_n = amplitude * sqrt(2 / L)``."""

    def rule(omega, spec):
        return np.full(omega.shape, amplitude * np.sqrt(2.0 / spec.length))

    return rule


def transmission_line_modes(
    spec: LineSpec, coupling_rule: Optional[CouplingRule] = None
) -> ModeSet:
    """Quarter-wave modes ``k_n = pi (n - 1/2) / L`` of an open-closed line."""
    n = np.arange(1, spec.n_modes + 1)
    omega = spec.speed * np.pi * (n - 0.5) / spec.length
    rule = coupling_rule or uniform_coupling()
    return ModeSet(omega, rule(omega, spec))


def n_eff_si(L_meters: float, T_kelvin: float) -> float:
    """Order-of-magnitude count of thermally populated line modes.

    ``k_B T L / (pi hbar c)``; a 1 m line at 0.1 K gives about 14.
    """
    if not L_meters > 0 or not T_kelvin > 0:
        raise ValueError("L and T must be positive")
    return const.k * T_kelvin * L_meters / (np.pi * const.hbar * const.c)
