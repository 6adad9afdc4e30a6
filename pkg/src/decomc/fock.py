"""Brute-force Fock-space reference for free oscillator baths.

Everything here is built from diagonal displacement-operator matrix
elements ``<n|D(a)|n> = exp(-|a|^2/2) L_n(|a|^2)`` and explicit state
enumeration. None of the saddle-point, contour or continuum code is used,
so results from this module serve as an independent oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator, Optional, Union

import numpy as np
from scipy import integrate

from .bath import CurrentProfile, ModeSet, current_fourier, current_power
from .errors import QuadratureFailure, ShellTooLarge, TruncationError

M_MAX_DEFAULT = 60


@dataclass(frozen=True)
class FockState:
    occupations: tuple

    def energy(self, modes: ModeSet) -> float:
        return float(np.dot(self.occupations, modes.frequencies))


@dataclass(frozen=True)
class ExactShell:
    """All states with excitation energy exactly ``M * omega0``."""

    M: int
    omega0: Optional[float] = None

    def __post_init__(self):
        if self.M < 0:
            raise ValueError("M must be >= 0")


@dataclass(frozen=True)
class WindowShell:
    """All states with energy in ``[E_center - half_width, E_center + half_width]``."""

    E_center: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("window half-width must be positive")


ShellSpec = Union[ExactShell, WindowShell]


@dataclass(frozen=True)
class DisplacementSet:
    alphas: np.ndarray
    c_phase: complex

    def __post_init__(self):
        if not math.isclose(abs(self.c_phase), 1.0, rel_tol=1e-12):
            raise ValueError("c_phase must have unit modulus")


def _c_number_phase(modes: ModeSet, profile: CurrentProfile) -> float:
    # (1/2) sum_n int dW/2pi |J_n(W)|^2 P 1/(w_n^2 - W^2); QAWC around the pole
    total = 0.0
    for w, a_n in zip(modes.frequencies, modes.amplitudes):
        A = profile.amplitude * a_n
        if A == 0:
            continue

        def g(W):
            return float(current_power(profile, a_n, W))

        f = lambda W: g(W) / (w * w - W * W)  # noqa: E731
        # keep the Cauchy window within half an oscillation of the pole
        d = min(0.5 * w, 0.5 * np.pi / profile.t)
        pv, err1 = integrate.quad(
            lambda W: -g(W) / (w + W), w - d, w + d, weight="cauchy", wvar=w,
            limit=2000, epsabs=1e-15,
        )
        zeros = 2 * np.pi / profile.t * np.arange(1, 200)
        for lo, hi in ((0.0, w - d), (w + d, 2 * w)):
            inside = zeros[(zeros > lo) & (zeros < hi)]
            v, e = integrate.quad(
                f, lo, hi, limit=2000, epsabs=1e-15, points=inside if inside.size else None
            )
            pv, err1 = pv + v, err1 + e
        cut = 0.0 if np.isinf(profile.omega_r) else 1.0 / profile.omega_r

        # 4 sin^2(Wt/2) = 2 (1 - cos Wt): smooth part plus a Fourier integral
        def base(W):
            return 2 * A**2 * np.exp(-W * cut) / (W**2 * (w * w - W * W))

        smooth, e_s = 0.0, 0.0
        for lo, hi in ((2 * w, 10 * w), (10 * w, np.inf)):
            v, e = integrate.quad(base, lo, hi, limit=2000, epsabs=1e-15)
            smooth, e_s = smooth + v, e_s + e
        with warnings.catch_warnings():
            # QAWF flags slow cycles long after the sum has converged
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            osc, e_o = integrate.quad(
                base, 2 * w, np.inf, weight="cos", wvar=profile.t, limlst=200, epsabs=1e-15
            )
        rest, err2 = smooth - osc, e_s + e_o
        if max(err1, err2) > 1e-10:
            raise QuadratureFailure(f"c-number phase integral for mode w={w}")
        total += (pv + rest) / (2 * np.pi)
    return total


def displacement_amplitudes(modes: ModeSet, profile: CurrentProfile) -> DisplacementSet:
    """Coherent shifts ``a_n = i J_n(w_n) / sqrt(2 w_n)`` and the c-number phase."""
    w = modes.frequencies
    alphas = 1j * current_fourier(profile, modes.amplitudes, w) / np.sqrt(2 * w)
    if profile.t == 0:
        return DisplacementSet(np.zeros_like(alphas), 1.0 + 0j)
    phase = _c_number_phase(modes, profile)
    return DisplacementSet(alphas, complex(np.exp(1j * phase)))


def laguerre_table(n_max: int, x) -> np.ndarray:
    """``L_0(x) .. L_{n_max}(x)`` by upward three-term recurrence; shape (n_max+1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def diagonal_overlaps(n_max: int, alpha) -> np.ndarray:
    """``<n|D(alpha)|n>`` for n = 0..n_max (per mode if ``alpha`` is an array)."""
    x = np.abs(np.asarray(alpha)) ** 2
    return np.exp(-0.5 * x) * laguerre_table(n_max, x)


# --- enumeration ---------------------------------------------------------


def _ladder_units(modes: ModeSet, omega0: Optional[float]) -> tuple[np.ndarray, float]:
    if len(modes) == 0:
        return np.zeros(0, dtype=int), (omega0 or 1.0)
    w0 = float(omega0) if omega0 else float(modes.frequencies[0])
    ratio = modes.frequencies / w0
    units = np.rint(ratio).astype(int)
    if np.any(units < 1) or not np.allclose(ratio, units, rtol=0, atol=1e-9):
        raise ValueError("ModeSet is not a commensurate ladder of omega0")
    return units, w0


def _compositions(units, target: int) -> Iterator[tuple]:
    n = len(units)
    occ = [0] * n

    def rec(i, left):
        if i < 0:
            if left == 0:
                yield tuple(occ)
            return
        u = units[i]
        for k in range(left // u, -1, -1):
            occ[i] = k
            yield from rec(i - 1, left - k * u)
        occ[i] = 0

    yield from rec(n - 1, target)


def enumerate_shell(
    modes: ModeSet, M: int, omega0: Optional[float] = None, M_max: int = M_MAX_DEFAULT
) -> list[FockState]:
    """Occupation vectors with ``sum_k n_k w_k = M * omega0`` on a commensurate ladder.

    For ``w_k = k * omega0`` the count equals the number of partitions of M
    into parts no larger than the mode count.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    if M > M_max:
        raise ShellTooLarge(f"M={M} exceeds guard M_max={M_max}")
    units, _ = _ladder_units(modes, omega0)
    return [FockState(o) for o in _compositions(list(units), M)]


def enumerate_window(
    modes: ModeSet, E_center: float, half_width: float, max_states: int = 2_000_000
) -> list[FockState]:
    """States of an arbitrary spectrum inside an energy window."""
    w = modes.frequencies
    lo, hi = E_center - half_width, E_center + half_width
    n = len(w)
    occ = [0] * n
    found: list[FockState] = []

    def rec(i, energy):
        if i < 0:
            if energy >= lo:
                found.append(FockState(tuple(occ)))
                if len(found) > max_states:
                    raise ShellTooLarge("energy window holds too many states")
            return
        k = 0
        while energy + k * w[i] <= hi + 1e-12 * max(1.0, hi):
            occ[i] = k
            rec(i - 1, energy + k * w[i])
            k += 1
        occ[i] = 0

    rec(n - 1, 0.0)
    return found


# --- coherences ----------------------------------------------------------


def coherence_exact_canonical(
    modes: ModeSet,
    profile: CurrentProfile,
    beta: float,
    n_max: Optional[int] = None,
    tail_tol: float = 1e-12,
) -> complex:
    """Thermal-state coherence by explicit Bose-weighted Fock sums per mode."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    disp = displacement_amplitudes(modes, profile)
    w = modes.frequencies
    if len(w) == 0:
        return disp.c_phase
    q = np.exp(-beta * w)
    # dropped weight per mode is q^(n_max+1)
    need = int(np.ceil(np.log(tail_tol) / np.log(q.max()))) if q.max() > 0 else 1
    if n_max is None:
        n_max = max(need, 1)
    elif q.max() ** (n_max + 1) > tail_tol:
        raise TruncationError(
            f"n_max={n_max} drops Bose weight {q.max() ** (n_max + 1):.3g} > {tail_tol}"
        )
    k = np.arange(n_max + 1)[:, None]
    p = (1 - q) * q**k
    per_mode = np.sum(p * diagonal_overlaps(n_max, disp.alphas), axis=0)
    return complex(np.prod(per_mode) * disp.c_phase)


def coherence_exact_microcanonical(
    modes: ModeSet,
    profile: CurrentProfile,
    shell: Union[int, ShellSpec],
    M_max: int = M_MAX_DEFAULT,
) -> complex:
    """Uniform average of ``<n|S|n>`` over an energy shell.

    ``shell`` is the integer M of an exact ladder shell, or a ShellSpec.
    """
    if isinstance(shell, (int, np.integer)):
        shell = ExactShell(int(shell))
    if isinstance(shell, ExactShell):
        states = enumerate_shell(modes, shell.M, shell.omega0, M_max)
    else:
        states = enumerate_window(modes, shell.E_center, shell.half_width)
    if not states:
        raise ValueError("energy shell is empty")
    disp = displacement_amplitudes(modes, profile)
    occ = np.array([s.occupations for s in states], dtype=int).reshape(len(states), -1)
    n_top = int(occ.max()) if occ.size else 0
    table = diagonal_overlaps(n_top, disp.alphas)  # (n_top+1, modes)
    cols = np.arange(occ.shape[1])
    terms = np.prod(table[occ, cols], axis=1) if occ.shape[1] else np.ones(len(states))
    mean = math.fsum(terms.tolist()) / len(states)
    return complex(mean * disp.c_phase)
