import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decomc import (
    DegenerateFit,
    Line1D,
    ModeSet,
    NonConvergence,
    TabulatedLogZ,
    Volume3D,
    beta_from_n_eff,
    energy,
    ladder_modes,
    log_partition,
    n_eff,
    scaling_exponent_fit,
    solve_beta,
    thermo_derivatives,
)

mpmath.mp.dps = 40


def mp_derivs(lnz, beta):
    b = mpmath.mpf(beta)
    d1, d2, d3 = (mpmath.diff(lnz, b, k) for k in (1, 2, 3))
    return float(-d1), float(b**2 * d2), float(-(b**2) * (2 * b * d2 + b**2 * d3))


mode_sets = st.lists(
    st.floats(0.05, 8.0), min_size=1, max_size=10, unique=True
).map(lambda w: ModeSet(sorted(w), np.ones(len(w))))


@settings(max_examples=25, deadline=None)
@given(modes=mode_sets, beta=st.floats(0.1, 10.0))
def test_mode_set_derivatives_match_mpmath(modes, beta):
    ws = [mpmath.mpf(float(x)) for x in modes.frequencies]

    def lnz(b):
        return -mpmath.fsum(mpmath.log(1 - mpmath.exp(-b * x)) for x in ws)

    tp = thermo_derivatives(modes, beta)
    ref = mp_derivs(lnz, beta)
    assert tp.logZ == pytest.approx(float(lnz(mpmath.mpf(beta))), rel=1e-12)
    for got, want in zip((tp.energy, tp.C_V, tp.dCv_dT), ref):
        assert got == pytest.approx(want, rel=1e-6, abs=1e-300)


def test_log_partition_complex_and_vectorised():
    m = ladder_modes(1.0, 3)
    z = np.array([1.0 - 0.5j, 2.0 + 0.1j])
    want = [-sum(np.log(1 - np.exp(-zz * k)) for k in (1, 2, 3)) for zz in z]
    np.testing.assert_allclose(log_partition(m, z), want, rtol=1e-14)
    assert isinstance(log_partition(m, 1.5), float) or np.isrealobj(log_partition(m, 1.5))
    with pytest.raises(ValueError):
        log_partition(m, -1.0)


def test_volume_derivatives_match_mpmath():
    v = Volume3D(5.0, 0.7)
    tp = thermo_derivatives(v, 1.3)
    ref = mp_derivs(lambda b: mpmath.mpf(v.coefficient) / b**3, 1.3)
    np.testing.assert_allclose((tp.energy, tp.C_V, tp.dCv_dT), ref, rtol=1e-10)


def test_line_heat_capacity_is_twice_n_eff():
    tp = thermo_derivatives(Line1D(7.0, 0.3), 0.9)
    assert tp.C_V == pytest.approx(2 * tp.n_eff, rel=1e-14)
    assert tp.dCv_dT == pytest.approx(tp.C_V / tp.temperature, rel=1e-14)


def test_tabulated_log_z_reproduces_mode_set():
    m = ModeSet([0.5, 1.1, 2.3], [1, 1, 1])
    beta = np.linspace(0.5, 3.0, 200)
    tab = TabulatedLogZ(beta, log_partition(m, beta))
    a, b = thermo_derivatives(tab, 1.4), thermo_derivatives(m, 1.4)
    assert a.energy == pytest.approx(b.energy, rel=1e-8)
    assert a.C_V == pytest.approx(b.C_V, rel=1e-6)
    assert a.dCv_dT == pytest.approx(b.dCv_dT, rel=1e-4)
    with pytest.raises(ValueError):
        thermo_derivatives(tab, 5.0)
    with pytest.raises(ValueError):
        log_partition(tab, 1.0 + 0.1j)


@pytest.mark.parametrize("source", [ladder_modes(0.3, 20), Line1D(4.0, 1.0), Volume3D(2.0, 0.5)])
def test_solve_beta_round_trip(source):
    for beta in (0.4, 1.0, 3.0):
        E = energy(source, beta)
        assert solve_beta(source, E) == pytest.approx(beta, rel=1e-10)


def test_solve_beta_errors():
    m = ladder_modes(1.0, 4)
    with pytest.raises(ValueError):
        solve_beta(m, 0.0)
    with pytest.raises(NonConvergence):
        solve_beta(m, 1e-320)


@pytest.mark.parametrize("source", [ladder_modes(0.1, 200), Line1D(4.0, 1.0), Volume3D(2.0, 0.5)])
def test_beta_from_n_eff(source):
    beta = beta_from_n_eff(source, 5.0)
    assert thermo_derivatives(source, beta).n_eff == pytest.approx(5.0, rel=1e-10)


def test_n_eff():
    assert n_eff(10.0, 0.5) == 5.0
    with pytest.raises(ValueError):
        n_eff(-1.0, 1.0)


class TestScalingFit:
    def test_recovers_exponent(self):
        L = np.array([3.0, 6.0, 12.0, 24.0])
        p, rms = scaling_exponent_fit(L, 2.0 * L**-1.3)
        assert p == pytest.approx(1.3, abs=1e-12)
        assert rms < 1e-12

    def test_degenerate(self):
        with pytest.raises(DegenerateFit):
            scaling_exponent_fit([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            scaling_exponent_fit([1.0, 2.0], [1.0, 2.0])
