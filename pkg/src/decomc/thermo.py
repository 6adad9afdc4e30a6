"""Bath thermodynamics on the real and complex inverse-temperature axes.

Energies are measured from the bath ground state (zero-point energy
dropped), so ``ln Z -> 0`` as ``beta -> inf`` and a commensurate ladder has
shell energies at integer multiples of its spacing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Sequence

import numpy as np
from scipy import interpolate, optimize

from .bath import ModeSet
from .errors import DegenerateFit, NonConvergence


@dataclass(frozen=True)
class ThermoPoint:
    beta: float
    energy: float
    logZ: float
    C_V: float
    dCv_dT: float

    @property
    def n_eff(self) -> float:
        return self.energy * self.beta

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta


@dataclass(frozen=True)
class Line1D:
    """Continuum limit of a one-dimensional acoustic bath of length L."""

    length: float
    speed: float

    def __post_init__(self):
        if not self.length > 0 or not self.speed > 0:
            raise ValueError("length and speed must be positive")

    @property
    def coefficient(self) -> float:
        # ln Z = coefficient / z
        return np.pi * self.length / (6 * self.speed)


@dataclass(frozen=True)
class Volume3D:
    """Continuum limit of a three-dimensional acoustic bath of volume V."""

    volume: float
    speed: float

    def __post_init__(self):
        if not self.volume > 0 or not self.speed > 0:
            raise ValueError("volume and speed must be positive")

    @property
    def coefficient(self) -> float:
        # ln Z = coefficient / z^3
        return np.pi**2 * self.volume / (90 * self.speed**3)


class TabulatedLogZ:
    """User-supplied ``ln Z(beta)`` table for baths without a mode model.

    A quintic interpolating spline supplies the three beta-derivatives;
    only real beta inside the table range is supported.
    """

    def __init__(self, beta: Sequence[float], logz: Sequence[float]):
        beta = np.asarray(beta, dtype=float)
        logz = np.asarray(logz, dtype=float)
        if beta.ndim != 1 or beta.shape != logz.shape or beta.size < 6:
            raise ValueError("need at least 6 (beta, lnZ) pairs")
        if np.any(beta <= 0) or np.any(np.diff(beta) <= 0):
            raise ValueError("beta column must be positive and increasing")
        self.beta = beta
        self.logz = logz
        self._spline = interpolate.make_interp_spline(beta, logz, k=5)

    @property
    def beta_range(self) -> tuple[float, float]:
        return float(self.beta[0]), float(self.beta[-1])

    def _check(self, beta):
        lo, hi = self.beta_range
        if not lo <= beta <= hi:
            raise ValueError(f"beta={beta} outside table range [{lo}, {hi}]")

    def __call__(self, beta, nu: int = 0):
        return self._spline(beta, nu)


def _check_z(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z.real <= 0):
        raise ValueError("Re z must be positive")
    return z


def _check_beta(beta):
    if not beta > 0:
        raise ValueError("beta must be positive")


# --- ln Z ----------------------------------------------------------------


@singledispatch
def log_partition(source, z):
    """``ln Z(z) = ln Tr exp(-z H)`` for ``Re z > 0``.

    Real for real z; vectorised over array-valued z.
    """
    raise TypeError(f"no partition function for {type(source).__name__}")


@log_partition.register
def _(source: ModeSet, z):
    z = _check_z(z)
    x = -z[..., None] * source.frequencies
    out = -np.log1p(-np.exp(x)).sum(axis=-1)
    return out.real if np.all(z.imag == 0) else out


@log_partition.register
def _(source: Line1D, z):
    return continuum_log_partition(source, z)


@log_partition.register
def _(source: Volume3D, z):
    return continuum_log_partition(source, z)


@log_partition.register
def _(source: TabulatedLogZ, z):
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.any(z.imag != 0):
        raise ValueError("tabulated ln Z cannot be continued off the real axis")
    beta = float(np.real(z))
    source._check(beta)
    return float(source(beta))


def continuum_log_partition(kind, z):
    """Leading continuum ``ln Z``: ``pi L/(6 v z)`` in 1D, ``pi^2 V/(90 v^3 z^3)`` in 3D."""
    z = _check_z(z)
    if isinstance(kind, Line1D):
        out = kind.coefficient / z
    elif isinstance(kind, Volume3D):
        out = kind.coefficient / z**3
    else:
        raise TypeError(f"unknown continuum kind {type(kind).__name__}")
    return out.real if np.all(z.imag == 0) else out


# --- derivatives ---------------------------------------------------------


@singledispatch
def thermo_derivatives(source, beta: float) -> ThermoPoint:
    """Energy, heat capacity and its temperature derivative at real beta."""
    raise TypeError(f"no thermodynamics for {type(source).__name__}")


@thermo_derivatives.register
def _(source: ModeSet, beta: float) -> ThermoPoint:
    _check_beta(beta)
    w = source.frequencies
    x = beta * w
    q = np.exp(-x)
    one_m = -np.expm1(-x)
    logz = -np.log1p(-q).sum()
    energy = np.sum(w * q / one_m)
    c_n = x**2 * q / one_m**2
    # d c_n / dx = 2x q/(1-q)^2 - x^2 q (1+q)/(1-q)^3
    dc_dx = 2 * x * q / one_m**2 - x**2 * q * (1 + q) / one_m**3
    dC_dbeta = np.sum(w * dc_dx)
    return ThermoPoint(
        beta=float(beta),
        energy=float(energy),
        logZ=float(logz),
        C_V=float(c_n.sum()),
        dCv_dT=float(-(beta**2) * dC_dbeta),
    )


@thermo_derivatives.register
def _(source: Line1D, beta: float) -> ThermoPoint:
    _check_beta(beta)
    a = source.coefficient
    # E = a T^2, C_V = 2 a T = 2 N_eff
    return ThermoPoint(float(beta), a / beta**2, a / beta, 2 * a / beta, 2 * a)


@thermo_derivatives.register
def _(source: Volume3D, beta: float) -> ThermoPoint:
    _check_beta(beta)
    b = source.coefficient
    return ThermoPoint(
        float(beta), 3 * b / beta**4, b / beta**3, 12 * b / beta**3, 36 * b / beta**2
    )


@thermo_derivatives.register
def _(source: TabulatedLogZ, beta: float) -> ThermoPoint:
    _check_beta(beta)
    source._check(beta)
    l0, l1, l2, l3 = (float(source(beta, k)) for k in range(4))
    dC_dbeta = 2 * beta * l2 + beta**2 * l3
    return ThermoPoint(float(beta), -l1, l0, beta**2 * l2, -(beta**2) * dC_dbeta)


def energy(source, beta: float) -> float:
    return thermo_derivatives(source, beta).energy


def solve_beta(
    source, E_target: float, rtol: float = 1e-12, beta_max: float = 700.0
) -> float:
    """Invert ``E(beta) = E_target``; E is strictly decreasing so the root is unique.

    For a ModeSet ``beta_max`` is in units of the inverse lowest frequency;
    targets needing a colder bath raise NonConvergence.
    """
    if not E_target > 0:
        raise ValueError("target energy must be positive")
    if isinstance(source, ModeSet) and len(source) == 0:
        raise ValueError("empty ModeSet has no thermal energy")
    if isinstance(source, TabulatedLogZ):
        lo, hi = source.beta_range
    elif isinstance(source, ModeSet):
        w_min = source.frequencies[0]
        # high-T: E ~ N / beta, so this lower bracket always overshoots
        lo = min(len(source) / E_target, 1.0 / w_min) * 1e-3
        hi = beta_max / w_min
    else:
        lo, hi = 1e-12, beta_max

    def resid(b):
        return energy(source, b) - E_target

    r_lo, r_hi = resid(lo), resid(hi)
    if r_lo < 0 or r_hi > 0:
        raise NonConvergence(
            f"cannot bracket E={E_target}: E(beta) spans [{r_hi + E_target}, {r_lo + E_target}]"
        )
    # bracketing in log(beta) keeps the search well scaled
    def clip(u):
        return float(min(max(np.exp(u), lo), hi))

    u = optimize.brentq(
        lambda u: resid(clip(u)), np.log(lo), np.log(hi), xtol=1e-15, rtol=1e-15, maxiter=500
    )
    beta = clip(u)
    if abs(resid(beta)) > max(rtol, 1e-13) * E_target:
        raise NonConvergence(f"E(beta) misses target by {resid(beta)}")
    return beta


def n_eff(E: float, beta: float) -> float:
    """Effective number of populated degrees of freedom, ``E * beta``."""
    if not E > 0 or not beta > 0:
        raise ValueError("E and beta must be positive")
    return E * beta


def scaling_exponent_fit(L, peaks) -> tuple[float, float]:
    """Fit ``|peak| ~ c L^-p`` by least squares in log-log.

    Returns ``(p, rms_residual)``.
    """
    L = np.asarray(L, dtype=float)
    y = np.abs(np.asarray(peaks, dtype=float))
    if L.size < 3 or L.shape != y.shape:
        raise ValueError("need at least 3 (L, peak) samples")
    if np.any(L <= 0) or np.any(y <= 0):
        raise ValueError("L and peak values must be non-zero")
    x = np.log(L)
    if np.ptp(x) == 0:
        raise DegenerateFit("all system sizes are equal")
    slope, intercept = np.polyfit(x, np.log(y), 1)
    resid = np.log(y) - (slope * x + intercept)
    return float(-slope), float(np.sqrt(np.mean(resid**2)))


def beta_from_n_eff(source, target: float, beta_max: float = 700.0) -> float:
    """Inverse temperature at which ``E(beta) * beta`` equals ``target``."""
    if not target > 0:
        raise ValueError("N_eff target must be positive")
    if isinstance(source, Line1D):
        return source.coefficient / target
    if isinstance(source, Volume3D):
        return (3 * source.coefficient / target) ** (1 / 3)
    if isinstance(source, ModeSet):
        if target >= len(source):
            # E beta approaches the mode count only as beta -> 0
            raise NonConvergence(f"N_eff={target} needs more than {len(source)} modes")
        lo, hi = 1e-8 / source.frequencies[-1], beta_max / source.frequencies[0]
    elif isinstance(source, TabulatedLogZ):
        lo, hi = source.beta_range
    else:
        raise TypeError(f"no thermodynamics for {type(source).__name__}")

    def resid(u):
        b = min(max(np.exp(u), lo), hi)  # exp(log x) may step outside a table
        return thermo_derivatives(source, b).energy * b - target

    if resid(np.log(lo)) * resid(np.log(hi)) > 0:
        raise NonConvergence(f"cannot bracket N_eff={target}")
    u = optimize.brentq(resid, np.log(lo), np.log(hi), xtol=1e-14, rtol=1e-14)
    return float(min(max(np.exp(u), lo), hi))
