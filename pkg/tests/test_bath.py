import math

import numpy as np
import pytest
from scipy import integrate

from decomc import (
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


class TestModeSet:
    def test_arrays_are_read_only(self):
        m = ModeSet([1.0, 2.0], [0.1, 0.2])
        with pytest.raises(ValueError):
            m.frequencies[0] = 3.0

    @pytest.mark.parametrize(
        "w, a",
        [([1.0, -2.0], [1, 1]), ([2.0, 1.0], [1, 1]), ([1.0, 1.0], [1, 1]), ([1.0], [1, 2])],
    )
    def test_rejects_invalid(self, w, a):
        with pytest.raises(ValueError):
            ModeSet(w, a)

    def test_empty_is_allowed(self):
        assert len(ModeSet([], [])) == 0

    def test_scaled_and_with_amplitudes(self):
        m = ladder_modes(0.5, 3, 0.2)
        np.testing.assert_allclose(m.scaled(3).amplitudes, 0.6)
        np.testing.assert_allclose(m.with_amplitudes([1, 2, 3]).frequencies, [0.5, 1.0, 1.5])


def test_ohmic_ladder_weights_match_density():
    w0, eta = 0.05, 0.3
    m = ohmic_ladder(w0, 40, eta)
    weight = np.pi * m.amplitudes**2 / (2 * m.frequencies)
    np.testing.assert_allclose(weight, eta * m.frequencies * w0, rtol=1e-14)


class TestCurrent:
    def test_zero_frequency_limit(self):
        p = CurrentProfile(2.5, 10.0, amplitude=0.7)
        assert current_fourier(p, 2.0, 0.0) == pytest.approx(0.7 * 2.0 * 2.5)
        # series branch joins the direct formula smoothly
        a = current_fourier(p, 1.0, 1e-7 / 2.5)
        b = current_fourier(p, 1.0, 1e-5 / 2.5)
        assert abs(a - b) < 1e-4

    def test_fourier_matches_direct_integral(self):
        p = CurrentProfile(1.7)
        for W in (0.3, 2.0, 11.0):
            re = integrate.quad(lambda s: math.cos(W * s), 0, p.t)[0]
            im = integrate.quad(lambda s: math.sin(W * s), 0, p.t)[0]
            assert current_fourier(p, 1.0, W) == pytest.approx(complex(re, im), abs=1e-12)

    def test_power_is_modulus_squared(self):
        p = CurrentProfile(3.0, 7.0, 1.3)
        W = np.linspace(-5, 5, 101)
        np.testing.assert_allclose(
            current_power(p, 0.4, W), np.abs(current_fourier(p, 0.4, W)) ** 2, rtol=1e-12, atol=1e-15
        )

    def test_profile_validation(self):
        with pytest.raises(ValueError):
            CurrentProfile(-1.0)
        with pytest.raises(ValueError):
            CurrentProfile(1.0, 0.0)
        assert CurrentProfile(1.0, 2 * np.pi).tau_r == pytest.approx(1.0)


class TestSpectralDensity:
    def test_ohmic(self):
        assert Ohmic(0.2)(3.0) == pytest.approx(0.6)
        with pytest.raises(ValueError):
            Ohmic(-1)

    def test_tabulated_is_zero_outside(self):
        F = Tabulated([1.0, 2.0, 3.0], [0.0, 1.0, 0.0])
        np.testing.assert_allclose(F([0.5, 1.5, 2.0, 3.5]), [0, 0.5, 1.0, 0])
        assert not F.empty
        assert Tabulated([], []).empty

    def test_tabulated_validation(self):
        with pytest.raises(ValueError):
            Tabulated([1.0, 1.0], [1, 1])
        with pytest.raises(ValueError):
            Tabulated([1.0, 2.0], [1, -1])

    def test_broadened_modes_carry_mode_weights(self):
        m = ModeSet([1.0, 2.5], [0.3, 0.5])
        F = spectral_density_from_modes(m, 0.02)
        total = np.trapezoid(F.values, F.omega) if hasattr(np, "trapezoid") else np.trapz(F.values, F.omega)
        assert total == pytest.approx(np.sum(np.pi * m.amplitudes**2 / (2 * m.frequencies)), rel=1e-6)


class TestTransmissionLine:
    def test_quarter_wave_modes(self):
        spec = LineSpec(2.0, 3.0, 4)
        m = transmission_line_modes(spec, uniform_coupling(0.5))
        np.testing.assert_allclose(m.frequencies, 3.0 * np.pi * (np.arange(1, 5) - 0.5) / 2.0)
        np.testing.assert_allclose(m.amplitudes, 0.5)
        # odd multiples of the fundamental
        np.testing.assert_allclose(m.frequencies / m.frequencies[0], [1, 3, 5, 7])

    def test_n_eff_si(self):
        assert n_eff_si(1.0, 0.1) == pytest.approx(13.9, abs=0.05)
        assert n_eff_si(2.0, 0.05) == pytest.approx(n_eff_si(1.0, 0.1), rel=1e-15)
        with pytest.raises(ValueError):
            n_eff_si(0.0, 0.1)
