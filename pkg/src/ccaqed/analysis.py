"""Synthetic spectroscopy maps and time-frequency analysis.

Transmission maps probe the dissipative array with a weak tone end to end;
FFT maps convert vacuum-Rabi time traces to oscillation-frequency spectra;
spectrograms localize emitted-field tones in time.
"""

from __future__ import annotations

import numpy as np

from .lattice import build_hamiltonian
from .openloss import build_non_hermitian
from .params import CouplingProfile, LossModel, TightBindingParams

__all__ = [
    "transmission_map",
    "fft_map",
    "spectrogram",
]


def _check_monotone(grid, name):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError(f"{name} must be a strictly increasing 1-d grid")
    return grid


def transmission_map(
    tb: TightBindingParams,
    cp: CouplingProfile,
    lm: LossModel,
    omega_p_grid: np.ndarray,
    omega_q_grid: np.ndarray,
) -> np.ndarray:
    """End-to-end transmission S21(omega_q, omega_p) of the driven array.

    Two-port Green's-function form: S21 proportional to
    sqrt(gamma_L gamma_R) <first site| (omega - H_NH)^-1 |last site>.
    Returns the complex map with shape (len(omega_q_grid),
    len(omega_p_grid)); ridges of |S21| trace the dressed-mode frequencies.
    """
    omega_p_grid = _check_monotone(omega_p_grid, "probe grid")
    omega_q_grid = _check_monotone(omega_q_grid, "qubit grid")
    prefactor = np.sqrt(lm.kappa_ext_L * lm.kappa_ext_R)
    out = np.empty((len(omega_q_grid), len(omega_p_grid)), dtype=complex)
    for k, wq in enumerate(omega_q_grid):
        h = build_hamiltonian(tb, wq, cp)
        hnh = build_non_hermitian(h, lm, n_sites=tb.N)
        vals, vecs = np.linalg.eig(hnh)
        vinv = np.linalg.inv(vecs)
        # resolvent element (0, N-1) = sum_k V[0,k] Vinv[k,N-1]/(w - lambda_k)
        weights = vecs[0, :] * vinv[:, tb.N - 1]
        out[k] = prefactor * (weights / (omega_p_grid[:, None] - vals)).sum(axis=1)
    return out


def fft_map(
    p_map: np.ndarray,
    dt: float,
    window: str = "hann",
    pad_factor: int = 4,
) -> tuple[np.ndarray, np.ndarray]:
    """Column-wise oscillation spectra of a population map over time.

    ``p_map`` has shape (n_time, n_columns) on a uniform grid with step
    ``dt`` (ns).  Each column has its mean removed, is multiplied by the
    window ("hann" or "rectangular"), zero-padded by ``pad_factor`` and
    Fourier transformed.  Returns (frequencies in GHz, complex spectra with
    shape (n_freq, n_columns)).
    """
    p_map = np.atleast_2d(np.asarray(p_map, dtype=float))
    if p_map.ndim != 2:
        raise ValueError("population map must be 2-d")
    n = p_map.shape[0]
    if n < 16:
        raise ValueError(f"need at least 16 time samples, got {n}")
    if dt <= 0:
        raise ValueError("time step must be positive")
    if pad_factor < 1:
        raise ValueError("pad factor must be >= 1")
    if window == "hann":
        w = np.hanning(n)
    elif window == "rectangular":
        w = np.ones(n)
    else:
        raise ValueError(f"unknown window {window!r}")
    data = (p_map - p_map.mean(axis=0, keepdims=True)) * w[:, None]
    n_pad = n * pad_factor
    spec = np.fft.rfft(data, n=n_pad, axis=0)
    freqs = np.fft.rfftfreq(n_pad, d=dt)
    return freqs, spec


def spectrogram(
    record: np.ndarray,
    dt: float,
    window: float = 200.0,
    step: float = 1.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sliding-window FFT magnitude of a complex field record.

    ``record`` is sampled at step ``dt`` (ns); ``window`` and ``step`` are
    in ns.  Returns (window-center times, frequencies in GHz, magnitude map
    with shape (n_freq, n_windows)).  Frequencies are two-sided, centered
    on zero, since the record is complex (a rotating-frame field).
    """
    record = np.asarray(record)
    n_win = int(round(window / dt))
    n_step = max(1, int(round(step / dt)))
    if n_win < 2:
        raise ValueError("window shorter than two samples")
    if len(record) <= n_win:
        raise ValueError("record must be longer than the window")
    w = np.hanning(n_win)
    starts = np.arange(0, len(record) - n_win + 1, n_step)
    segs = np.stack([record[s : s + n_win] * w for s in starts], axis=1)
    spec = np.fft.fftshift(np.fft.fft(segs, axis=0), axes=0)
    freqs = np.fft.fftshift(np.fft.fftfreq(n_win, d=dt))
    t_centers = (starts + (n_win - 1) / 2.0) * dt
    return t_centers, freqs, np.abs(spec)
