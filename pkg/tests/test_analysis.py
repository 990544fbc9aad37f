"""Tests for spectroscopy maps and time-frequency analysis."""

import numpy as np
import pytest

from ccaqed.analysis import fft_map, spectrogram, transmission_map
from ccaqed.lattice import build_hamiltonian, sweep_and_track
from ccaqed.params import (
    CouplingProfile,
    LossModel,
    TightBindingParams,
    golden_coupling,
    golden_loss,
    golden_tight_binding,
)


def small_device():
    tb = TightBindingParams(omega_r=5.0, Z_r=100.0, J=(0.3, 0.2), N=8)
    cp = CouplingProfile(first_site=3, g=(0.05, 0.08))
    lm = LossModel(kappa_int=5e-4, kappa_ext_L=2e-3, kappa_ext_R=2e-3)
    return tb, cp, lm


class TestTransmissionMap:
    def test_uncoupled_ridges_do_not_move(self):
        tb, _, lm = small_device()
        # vanishing coupling; park the bare qubit pole outside the band so
        # accidental degeneracy with an array mode cannot hybridize it
        cp0 = CouplingProfile(first_site=3, g=(1e-12,))
        wp = np.linspace(4.0, 6.0, 401)
        wq = np.linspace(6.5, 7.5, 5)
        s21 = transmission_map(tb, cp0, lm, wp, wq)
        # with the qubit decoupled the whole map is independent of omega_q
        spread = np.max(np.abs(s21 - s21[0]), axis=1)
        assert np.all(spread < 1e-9 * np.max(np.abs(s21)))

    def test_ridges_follow_dressed_modes(self):
        tb, cp, lm = small_device()
        wp = np.linspace(4.2, 5.9, 1201)
        wq = np.linspace(4.8, 5.3, 7)
        s21 = transmission_map(tb, cp, lm, wp, wq)
        spec = sweep_and_track(tb, cp, wq)
        dw = wp[1] - wp[0]
        for k in range(len(wq)):
            mag = np.abs(s21[k])
            # every interior dressed mode lines up with a local ridge
            for wm in spec.omega_tilde[k]:
                if not (wp[0] + 5 * dw < wm < wp[-1] - 5 * dw):
                    continue
                i = int(np.searchsorted(wp, wm))
                lo, hi = max(0, i - 3), min(len(wp), i + 4)
                j = lo + int(np.argmax(mag[lo:hi]))
                # the local maximum sits within one grid step of the mode
                assert abs(wp[j] - wm) <= 2 * dw

    def test_monotone_grid_required(self):
        tb, cp, lm = small_device()
        with pytest.raises(ValueError, match="increasing"):
            transmission_map(tb, cp, lm, np.array([5.0, 4.0]), np.array([4.0, 5.0]))
        with pytest.raises(ValueError, match="increasing"):
            transmission_map(tb, cp, lm, np.array([4.0, 5.0]), np.array([5.0, 5.0]))

    def test_map_shape_and_symmetric_port_scaling(self):
        tb, cp, lm = small_device()
        wp = np.linspace(4.5, 5.5, 11)
        wq = np.linspace(4.9, 5.1, 3)
        s21 = transmission_map(tb, cp, lm, wp, wq)
        assert s21.shape == (3, 11)
        assert np.iscomplexobj(s21)


class TestFftMap:
    def test_pure_cosine_peak_within_padded_bin(self):
        dt = 0.5
        t = np.arange(512) * dt
        f0 = 0.123
        col = np.cos(2 * np.pi * f0 * t)
        freqs, spec = fft_map(col[:, None], dt)
        peak = freqs[np.abs(spec[:, 0]).argmax()]
        assert abs(peak - f0) <= freqs[1] - freqs[0]

    def test_parseval_with_rectangular_window(self):
        rng = np.random.default_rng(3)
        dt = 1.0
        x = rng.normal(size=(256, 2))
        freqs, spec = fft_map(x, dt, window="rectangular", pad_factor=4)
        xc = x - x.mean(axis=0, keepdims=True)
        e_time = np.sum(xc**2, axis=0)
        # rfft halves the spectrum: double interior bins, not DC/Nyquist
        n_pad = 256 * 4
        w = np.full(len(freqs), 2.0)
        w[0] = 1.0
        if n_pad % 2 == 0:
            w[-1] = 1.0
        e_freq = (w[:, None] * np.abs(spec) ** 2).sum(axis=0) / n_pad
        np.testing.assert_allclose(e_freq, e_time, rtol=1e-10)

    def test_mean_removal_kills_dc(self):
        dt = 1.0
        col = np.full(64, 0.7)
        freqs, spec = fft_map(col[:, None], dt, window="rectangular")
        assert np.max(np.abs(spec)) < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError, match="16"):
            fft_map(np.zeros((8, 1)), 1.0)
        with pytest.raises(ValueError, match="step"):
            fft_map(np.zeros((32, 1)), 0.0)
        with pytest.raises(ValueError, match="window"):
            fft_map(np.zeros((32, 1)), 1.0, window="kaiser")
        with pytest.raises(ValueError, match="pad"):
            fft_map(np.zeros((32, 1)), 1.0, pad_factor=0)

    def test_vacuum_rabi_column_shows_2g(self):
        # a detuned-free qubit-cavity swap oscillates at 2 g
        g, dt = 0.02, 1.0
        t = np.arange(400) * dt
        pe = np.cos(2 * np.pi * g * t) ** 2  # oscillates at 2 g
        freqs, spec = fft_map(pe[:, None], dt)
        peak = freqs[np.abs(spec[:, 0]).argmax()]
        assert abs(peak - 2 * g) <= 2 * (freqs[1] - freqs[0])


class TestSpectrogram:
    def test_stationary_tone_horizontal_line(self):
        dt = 1.0
        t = np.arange(1200) * dt
        rec = np.exp(-2j * np.pi * 0.05 * t)
        tc, freqs, mag = spectrogram(rec, dt, window=200.0, step=10.0)
        ridge = freqs[mag.argmax(axis=0)]
        np.testing.assert_allclose(ridge, -0.05, atol=freqs[1] - freqs[0])

    def test_chirp_ridge_slope(self):
        dt = 0.5
        t = np.arange(4000) * dt
        rate = 1e-4  # GHz per ns
        rec = np.exp(2j * np.pi * (0.02 * t + 0.5 * rate * t**2))
        tc, freqs, mag = spectrogram(rec, dt, window=200.0, step=20.0)
        ridge = freqs[mag.argmax(axis=0)]
        slope = np.polyfit(tc, ridge, 1)[0]
        assert abs(slope - rate) < 0.15 * rate

    def test_two_segment_tone_shifts(self):
        dt = 1.0
        t1 = np.arange(600) * dt
        t2 = np.arange(600) * dt
        rec = np.concatenate(
            [np.exp(2j * np.pi * 0.03 * t1), np.exp(2j * np.pi * 0.12 * t2)]
        )
        tc, freqs, mag = spectrogram(rec, dt, window=200.0, step=5.0)
        ridge = freqs[mag.argmax(axis=0)]
        df = freqs[1] - freqs[0]
        assert abs(ridge[0] - 0.03) <= df
        assert abs(ridge[-1] - 0.12) <= df

    def test_validation(self):
        with pytest.raises(ValueError, match="longer"):
            spectrogram(np.ones(100, dtype=complex), 1.0, window=200.0)
        with pytest.raises(ValueError, match="window"):
            spectrogram(np.ones(100, dtype=complex), 1.0, window=1.0)
