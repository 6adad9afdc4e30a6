"""Canonical decoherence exponent ``Q = Q_R + i Q_I`` and its continuation.

Three routes to ``Q_R`` are provided: the exact discrete-mode sum, the
spectral-density integral, and the Ohmic closed form. All of them accept a
complex inverse temperature ``z`` with ``Re z > 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, special

from .bath import CurrentProfile, ModeSet, Ohmic, Tabulated, current_power
from .errors import QuadratureFailure

Source = Union[ModeSet, Ohmic, Tabulated]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class DecoherenceExponent:
    q_r: float
    q_i: float
    beta_or_z: complex
    provenance: str  # "discrete" | "continuum" | "ohmic-closed-form"

    @property
    def q(self) -> complex:
        return complex(self.q_r, self.q_i)

    @property
    def coherence(self) -> complex:
        return np.exp(-self.q)


def coth(y):
    """Hyperbolic cotangent stable for large ``Re y``; accepts complex."""
    y = np.asarray(y)
    sgn = np.where(np.real(y) < 0, -1.0, 1.0)
    q = np.exp(-2 * sgn * y)
    return sgn * (1 + q) / (1 - q)


def bose_factor(beta, omega):
    """``2 n_B + 1 = coth(beta w / 2)``; returns 1 at ``beta = inf``."""
    if np.isinf(beta):
        return np.ones_like(np.asarray(omega, dtype=float))
    return coth(0.5 * beta * np.asarray(omega))


def _quad(f, a, b, what, epsabs=1e-13, epsrel=1e-11, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=2000, **kw)
    if not np.isfinite(val) or err > max(1e3 * epsabs, 1e-6 * abs(val)):
        raise QuadratureFailure(f"{what}: error estimate {err:.3g} for value {val:.6g}")
    return val


# --- Green function ------------------------------------------------------


def free_green_fourier(omega_n: float, Omega, eps: float = 1e-12):
    """Causal free-oscillator propagator ``1/(w^2 - W^2 - i 2 w eps)``."""
    if not omega_n > 0:
        raise ValueError("omega_n must be positive")
    Omega = np.asarray(Omega, dtype=float)
    return 1.0 / (omega_n**2 - Omega**2 - 2j * omega_n * eps)


def _mode_pv_integral(omega: float, profile: CurrentProfile) -> float:
    """``P int_0^inf |J_1(W)|^2 / (w^2 - W^2) dW`` for unit amplitude.

    The pole at ``W = w`` is removed by subtracting ``|J(w)|^2``; on the
    symmetric window ``[0, 2w]`` the compensating logarithm vanishes.
    """
    unit = CurrentProfile(profile.t, profile.omega_r, 1.0)
    g = lambda W: float(current_power(unit, 1.0, W))  # noqa: E731
    g0 = g(omega)

    def near(W):
        return ((g(W) - g0) / (omega - W) + g(W) / (omega + W)) / (2 * omega)

    t = profile.t
    n_brk = int(min(200, np.ceil(2 * omega * t / np.pi)))
    inner = 0.0
    for lo, hi in ((0.0, omega), (omega, 2 * omega)):
        pts = np.linspace(lo, hi, n_brk + 2)[1:-1] if n_brk else None
        inner += _quad(near, lo, hi, "Q_I pole window", points=pts)

    # tail: 2 e^{-W/wr} (1 - cos W t) / (W^2 (w^2 - W^2))
    cut = 0.0 if np.isinf(profile.omega_r) else 1.0 / profile.omega_r

    def base(W):
        return 2 * np.exp(-W * cut) / (W**2 * (omega**2 - W**2))

    tail = _quad(base, 2 * omega, np.inf, "Q_I tail")
    if t > 0:
        tail -= _quad(base, 2 * omega, np.inf, "Q_I oscillatory tail", weight="cos", wvar=t)
    return inner + tail


def _pv_kernel(p, omega):
    """``P int_0^inf exp(-p W) / (w^2 - W^2) dW`` for ``Re p >= 0``, ``p != 0``."""
    x = p * omega
    return (np.exp(-x) * special.expi(x) + np.exp(x) * special.exp1(x)) / (2 * omega)


def q_imag_mode(omega, profile: CurrentProfile):
    """Unit-amplitude ``Q_I`` of free modes at frequencies ``omega``.

    Partial fractions split ``1/(W^2 (w^2 - W^2))`` into a regular piece and a
    principal-value piece; with the exponential cutoff both reduce to
    exponential integrals of complex argument. Where those cancel badly
    (``w t`` tiny) the adaptive quadrature route is used instead.
    """
    omega = np.asarray(omega, dtype=float)
    t = profile.t
    if t == 0:
        return np.zeros_like(omega)[()]
    eps = 0.0 if np.isinf(profile.omega_r) else 1.0 / profile.omega_r
    if eps > 0:
        regular = t * np.arctan(t / eps) - 0.5 * eps * np.log1p((t / eps) ** 2)
        k0 = _pv_kernel(eps, omega)
    else:
        regular = 0.5 * np.pi * t
        k0 = 0.0
    pv = k0 - np.real(_pv_kernel(complex(eps, -t), omega))
    out = -(regular + pv) / (np.pi * omega**2)
    bad = np.abs(regular + pv) < 1e-6 * abs(regular)
    if np.any(bad):
        out = np.where(bad, [_q_imag_mode_quad(w, profile) for w in np.atleast_1d(omega)], out)
    return out[()] if np.ndim(out) == 0 else out


def _q_imag_mode_quad(omega: float, profile: CurrentProfile) -> float:
    if profile.t == 0:
        return 0.0
    return -_mode_pv_integral(omega, profile) / (2 * np.pi)


# --- discrete modes ------------------------------------------------------


def _mode_weights(modes: ModeSet, profile: CurrentProfile):
    w = modes.frequencies
    return current_power(profile, modes.amplitudes, w) / (4 * w)


def q_discrete(
    modes: ModeSet, profile: CurrentProfile, beta: float, imaginary: bool = True
) -> DecoherenceExponent:
    """Exact exponent of a free bath at inverse temperature ``beta``.

    ``Q_R = sum_n |J_n(w_n)|^2 coth(beta w_n / 2) / (4 w_n)``; ``Q_I`` is the
    principal-value integral over the real part of the free propagator.
    ``beta = inf`` gives the zero-temperature value.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    w = modes.frequencies
    q_r = float(np.sum(_mode_weights(modes, profile) * bose_factor(beta, w)))
    q_i = q_imag_discrete(modes, profile) if imaginary else 0.0
    return DecoherenceExponent(q_r, q_i, beta, "discrete")


def q_imag_discrete(modes: ModeSet, profile: CurrentProfile) -> float:
    """Temperature-independent ``Q_I`` of a free bath."""
    if len(modes) == 0 or profile.t == 0:
        return 0.0
    A2 = (profile.amplitude * modes.amplitudes) ** 2
    return float(np.sum(A2 * q_imag_mode(modes.frequencies, profile)))


def _q_discrete_z(modes, profile, z, derivs=False):
    c = _mode_weights(modes, profile)
    w = modes.frequencies
    z = np.asarray(z, dtype=complex)
    y = 0.5 * z[..., None] * w
    q = np.exp(-2 * y)
    val = np.sum(c * (1 + q) / (1 - q), axis=-1)
    if not derivs:
        return val
    csch2 = 4 * q / (1 - q) ** 2
    d1 = np.sum(c * (-0.5 * w) * csch2, axis=-1)
    d2 = np.sum(c * 0.5 * w**2 * csch2 * (1 + q) / (1 - q), axis=-1)
    return val, d1, d2


# --- continuum -----------------------------------------------------------


def _kernel_integrand(F, profile, z):
    """Integrand of the continuum Q_R with the omega -> 0 limit built in."""
    t, omega_r = profile.t, profile.omega_r
    cut = 0.0 if np.isinf(omega_r) else 1.0 / omega_r
    A2 = profile.amplitude**2
    small = 1e-3 / max(t, abs(z))

    def f(w):
        w = np.asarray(w, dtype=float)
        ws = np.where(w < small, 1.0, w)
        full = (
            F(ws) * 2 * np.sin(0.5 * ws * t) ** 2 * np.exp(-ws * cut)
            * coth(0.5 * z * ws) / (np.pi * ws**2)
        )
        # (1 - cos wt) coth(zw/2) / w^2 -> t^2 / (z w)
        series = F(w) * t**2 / (np.pi * z * np.where(w > 0, w, 1.0)) * np.exp(-w * cut)
        return A2 * np.where(w < small, series, full)

    return f


def _q_r_callable(F, profile: CurrentProfile, z: complex) -> complex:
    t = profile.t
    if t == 0:
        return 0.0
    if isinstance(F, Ohmic) and np.isinf(profile.omega_r):
        raise ValueError("Ohmic Q_R diverges without a finite omega_r")
    f = _kernel_integrand(F, profile, z)
    a = np.pi / t
    cut = 0.0 if np.isinf(profile.omega_r) else 1.0 / profile.omega_r
    A2 = profile.amplitude**2

    def smooth(w):  # K(w) without the (1 - cos) factor
        return A2 * F(w) * np.exp(-w * cut) * coth(0.5 * z * w) / (np.pi * w**2)

    out = 0j
    for part in (np.real, np.imag):
        if part is np.imag and np.imag(z) == 0:
            continue
        head = _quad(lambda w: part(f(w)), 0.0, a, "Q_R head")
        brk = sorted({x for x in (1.0 / abs(z), profile.omega_r) if np.isfinite(x) and x > a})
        body, lo = 0.0, a
        for hi in brk + [np.inf]:
            body += _quad(lambda w: part(smooth(w)), lo, hi, "Q_R body")
            lo = hi
        osc = _quad(lambda w: part(smooth(w)), a, np.inf, "Q_R oscillatory", weight="cos", wvar=t)
        val = head + body - osc
        out += val if part is np.real else 1j * val
    return out


def _gl_nodes(edges, t):
    """Composite 8-point Gauss-Legendre nodes, refined to resolve cos(w t)."""
    edges = np.asarray(edges, dtype=float)
    lengths = np.diff(edges)
    if t > 0:
        sub = np.maximum(1, np.ceil(lengths * t / (np.pi / 2))).astype(int)
    else:
        sub = np.ones_like(lengths, dtype=int)
    lo_all, h_all = [], []
    for lo, L, m in zip(edges[:-1], lengths, sub):
        h = L / m
        lo_all.append(lo + h * np.arange(m))
        h_all.append(np.full(m, h))
    lo_all = np.concatenate(lo_all)
    h_all = np.concatenate(h_all)
    x = lo_all[:, None] + 0.5 * h_all[:, None] * (_GL_X + 1)
    w = 0.5 * h_all[:, None] * _GL_W
    return x.ravel(), w.ravel()


def _q_r_tabulated(F: Tabulated, profile: CurrentProfile, z) -> complex:
    if profile.t == 0 or F.empty:
        return 0.0
    x, wts = _gl_nodes(F.omega, profile.t)
    return np.sum(wts * _kernel_integrand(F, profile, z)(x))


def q_r_continuum(F, profile: CurrentProfile, beta: float) -> float:
    """``(1/pi) int dw F(w) (1 - cos wt) e^{-w/wr} coth(beta w/2) / w^2``.

    Adaptive quadrature for callable densities (Ohmic); composite
    Gauss-Legendre over the nodes for tabulated ones.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if isinstance(F, Tabulated):
        return float(np.real(_q_r_tabulated(F, profile, beta)))
    return float(np.real(_q_r_callable(F, profile, beta)))


# --- Ohmic closed form ---------------------------------------------------


def _log_sinhc(x):
    """``ln(sinh x / x)``, analytic for ``Re x > 0``."""
    x = np.asarray(x)
    small = np.abs(x) < 0.5
    xs = np.where(small, 1.0, x)
    big = xs - np.log(2.0) + np.log1p(-np.exp(-2 * xs)) - np.log(xs)
    x2 = x * x
    series = x2 / 6 - x2**2 / 180 + x2**3 / 2835 - x2**4 / 37800
    return np.where(small, series, big)


def _x_coth_x(x):
    x = np.asarray(x)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1 + x * x / 3, xs * coth(xs))


def _second_log_sinhc(x):
    """``2 x coth x - 1 - x^2 / sinh^2 x`` (beta^2 times the second beta-derivative)."""
    x = np.asarray(x)
    small = np.abs(x) < 1e-2
    xs = np.where(small, 1.0, x)
    q = np.exp(-2 * xs)
    big = 2 * _x_coth_x(xs) - 1 - 4 * xs**2 * q / (1 - q) ** 2
    return np.where(small, x * x - x**4 / 9, big)


def q_ohmic_closed(eta: float, beta, omega_r: float, t: float):
    """Closed-form Ohmic ``Q_R`` and its first two beta-derivatives.

    ``(eta/2pi) ln(1 + wr^2 t^2) + (eta/pi) ln[(beta/(pi t)) sinh(pi t/beta)]``.
    This is the sharp-cutoff (``beta * omega_r -> inf``) evaluation of the
    thermal integral; see :func:`q_ohmic_exact` for the finite-cutoff value.
    ``beta`` may be complex with positive real part.
    """
    if t == 0:
        return 0.0, 0.0, 0.0
    if not t > 0 or not omega_r > 0 or not eta >= 0 or not np.real(beta) > 0:
        raise ValueError("invalid Ohmic arguments")
    x = np.pi * t / beta
    if np.iscomplexobj(x) and abs(np.sinh(x)) < 1e-9:
        raise ValueError("z too close to a zero of sinh(pi t / z)")
    q = eta / (2 * np.pi) * np.log1p(omega_r**2 * t**2) + eta / np.pi * _log_sinhc(x)
    u = _x_coth_x(x) - 1
    dq = -eta / np.pi * u / beta
    d2q = eta / np.pi * _second_log_sinhc(x) / beta**2
    conv = complex if np.iscomplexobj(x) else float
    return conv(q), conv(dq), conv(d2q)


def q_ohmic_exact(eta: float, beta, omega_r: float, t: float):
    """Ohmic ``Q_R`` with the exponential cutoff kept at finite ``beta * omega_r``.

    Expanding the Bose factor as a geometric series gives
    ``(eta/pi) ln[Gamma(1+c)^2 / (Gamma(1+c+ix) Gamma(1+c-ix))]`` for the
    thermal part, with ``c = 1/(beta omega_r)`` and ``x = t/beta``.
    """
    if t == 0:
        return 0.0
    c = 1.0 / (beta * omega_r)
    x = t / beta
    lg = special.loggamma
    thermal = 2 * lg(1 + c) - lg(1 + c + 1j * x) - lg(1 + c - 1j * x)
    q = eta / (2 * np.pi) * np.log1p(omega_r**2 * t**2) + eta / np.pi * thermal
    return complex(q) if np.iscomplexobj(beta) else float(np.real(q))


def q_large_t(eta: float, beta: float, t: float):
    """Leading large-``t`` Ohmic exponent ``eta t / beta`` and its beta-derivatives."""
    return eta * t / beta, -eta * t / beta**2, 2 * eta * t / beta**3


# --- complex continuation and derivatives --------------------------------


def q_complex(source: Source, profile: CurrentProfile, z, imaginary: bool = True):
    """``Q`` at complex inverse temperature ``z``; vectorised over ``z``.

    ModeSet: exact discrete sum plus the constant ``i Q_I``.
    Ohmic: continued closed form (``Q_I`` neglected).
    Tabulated: quadrature with complex ``coth``.
    """
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.real <= 0):
        raise ValueError("Re z must be positive")
    if isinstance(source, ModeSet):
        out = _q_discrete_z(source, profile, z_arr)
        if imaginary and profile.t > 0:
            out = out + 1j * q_imag_discrete(source, profile)
    elif isinstance(source, Ohmic):
        out = np.vectorize(
            lambda zz: q_ohmic_closed(source.eta, zz, profile.omega_r, profile.t)[0],
            otypes=[complex],
        )(z_arr)
    elif isinstance(source, Tabulated):
        out = np.vectorize(
            lambda zz: _q_r_tabulated(source, profile, zz), otypes=[complex]
        )(z_arr)
        if imaginary and profile.t > 0:
            out = out + 1j * q_imag_continuum(source, profile)
    else:
        out = np.vectorize(lambda zz: _q_r_callable(source, profile, zz), otypes=[complex])(z_arr)
    return out[()] if out.ndim == 0 else out


def q_beta_derivatives(source: Source, profile: CurrentProfile, beta: float, step: float = 1e-4):
    """``(Q, Q_beta, Q_betabeta)`` at real beta.

    Analytic for ModeSet and Ohmic sources; otherwise central differences of
    :func:`q_complex` with step ``beta * step`` and one Richardson stage.
    """
    if isinstance(source, ModeSet):
        q, d1, d2 = _q_discrete_z(source, profile, beta, derivs=True)
        qi = q_imag_discrete(source, profile) if profile.t > 0 else 0.0
        return complex(q) + 1j * qi, float(np.real(d1)), float(np.real(d2))
    if isinstance(source, Ohmic):
        q, d1, d2 = q_ohmic_closed(source.eta, beta, profile.omega_r, profile.t)
        return complex(q), d1, d2

    def qr(b):
        return float(np.real(q_complex(source, profile, b, imaginary=False)))

    h = beta * step
    q0 = qr(beta)
    qi = q_imag_continuum(source, profile) if isinstance(source, Tabulated) else 0.0

    def d1(h):
        return (qr(beta + h) - qr(beta - h)) / (2 * h)

    def d2(h):
        return (qr(beta + h) - 2 * q0 + qr(beta - h)) / h**2

    first = (4 * d1(h / 2) - d1(h)) / 3
    second = (4 * d2(h / 2) - d2(h)) / 3
    return complex(q0, qi), first, second


# --- dispersion relation -------------------------------------------------


def hermitean_part_dispersion(F: Tabulated, Omega):
    """``(1/pi) P int_0^inf F(w) [1/(w - W) + 1/(w + W)] dw``.

    Exact principal value of the piecewise-linear interpolant: on each
    segment the integrand value at the pole is subtracted, leaving a
    constant plus a logarithm. Even in ``W``.
    """
    Omega = np.abs(np.atleast_1d(np.asarray(Omega, dtype=float)))
    if F.empty:
        return np.zeros_like(Omega) if Omega.size > 1 else 0.0
    w, f = F.omega, F.values
    a, b = w[:-1], w[1:]
    c1 = np.diff(f) / np.diff(w)
    c0 = f[:-1] - c1 * a
    for end, fe in ((w[0], f[0]), (w[-1], f[-1])):
        if fe != 0 and np.any(np.isclose(Omega, end, rtol=0, atol=1e-14 * end)):
            raise ValueError("principal value undefined at a table edge with F != 0")

    def seg(p):
        # sum_seg int_a^b (c0 + c1 w)/(w - p) dw, log(0) terms cancel pairwise
        with np.errstate(divide="ignore"):
            lb = np.log(np.abs(b - p))
            la = np.log(np.abs(a - p))
        lb = np.where(np.isfinite(lb), lb, 0.0)
        la = np.where(np.isfinite(la), la, 0.0)
        return np.sum(c1 * (b - a) + (c0 + c1 * p) * (lb - la))

    out = np.array([(seg(W) + seg(-W)) / np.pi for W in Omega])
    return out if out.size > 1 else float(out[0])


def q_imag_continuum(F: Tabulated, profile: CurrentProfile) -> float:
    """``Q_I = -(1/2pi) int_0^inf |J_1(W)|^2 Delta'(W) dW`` for a tabulated density."""
    if profile.t == 0 or F.empty:
        return 0.0
    unit = CurrentProfile(profile.t, profile.omega_r, profile.amplitude)
    edges = np.concatenate([[0.0], F.omega])
    x, wts = _gl_nodes(edges, profile.t)
    head = np.sum(wts * current_power(unit, 1.0, x) * hermitean_part_dispersion(F, x))
    top = F.omega[-1]
    cut = 0.0 if np.isinf(profile.omega_r) else 1.0 / profile.omega_r

    def base(W):
        return 2 * np.exp(-W * cut) / W**2 * hermitean_part_dispersion(F, W)

    # beyond the table Delta' is smooth and decays as W^-2
    tail = _quad(base, 2 * top, np.inf, "dispersion tail", epsabs=1e-11)
    tail -= _quad(base, 2 * top, np.inf, "dispersion tail", epsabs=1e-11, weight="cos", wvar=profile.t)
    xm, wm = _gl_nodes(np.linspace(top, 2 * top, 64), profile.t)
    mid = np.sum(wm * current_power(unit, 1.0, xm) * hermitean_part_dispersion(F, xm))
    return float(-(head + mid + tail) / (2 * np.pi))


def canonical_exponent(
    source: Source, profile: CurrentProfile, beta: float, ohmic: str = "closed"
) -> DecoherenceExponent:
    """Thermal exponent by the natural route for each source.

    ``ohmic`` picks the Ohmic evaluation: ``"closed"`` (sharp-cutoff closed
    form), ``"exact"`` (finite-cutoff Gamma form) or ``"quadrature"``.
    The Ohmic ``Q_I`` is not evaluated and reported as 0.
    """
    if isinstance(source, ModeSet):
        return q_discrete(source, profile, beta)
    if isinstance(source, Tabulated):
        q_r = q_r_continuum(source, profile, beta)
        return DecoherenceExponent(q_r, q_imag_continuum(source, profile), beta, "continuum")
    if isinstance(source, Ohmic):
        if ohmic == "closed":
            q_r, _, _ = q_ohmic_closed(source.eta, beta, profile.omega_r, profile.t)
            return DecoherenceExponent(float(q_r), 0.0, beta, "ohmic-closed-form")
        if ohmic == "exact":
            q_r = q_ohmic_exact(source.eta, beta, profile.omega_r, profile.t)
            return DecoherenceExponent(float(q_r), 0.0, beta, "ohmic-closed-form")
        if ohmic == "quadrature":
            return DecoherenceExponent(q_r_continuum(source, profile, beta), 0.0, beta, "continuum")
        raise ValueError(f"unknown Ohmic route {ohmic!r}")
    raise TypeError(f"no decoherence exponent for {type(source).__name__}")
