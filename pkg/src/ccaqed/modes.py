"""Bare-chain mode basis, qubit-mode couplings and participation ratios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import DressedSpectrum, chain_hamiltonian, fix_eigenvector_phases
from .params import CouplingProfile, DisorderRealization, TightBindingParams

__all__ = [
    "ModeBasis",
    "mode_basis",
    "mode_couplings",
    "superstrong_metrics",
    "participation_direct",
    "participation_hellmann_feynman",
]


@dataclass(frozen=True)
class ModeBasis:
    """Normal modes of the bare chain, with qubit couplings rotated in.

    ``d[s, n]`` is the amplitude of mode n on site s (orthonormal columns,
    global sign fixed); ``G[n]`` is the qubit coupling to mode n.
    """

    Omega: np.ndarray  # bare mode frequencies (GHz), ascending
    d: np.ndarray  # (N, N) mode amplitudes
    G: np.ndarray  # (N,) qubit-mode couplings (GHz)

    def detunings(self, omega_q: float) -> np.ndarray:
        """Delta_n = Omega_n - omega_q."""
        return self.Omega - omega_q

    @property
    def spacings(self) -> np.ndarray:
        """Nearest-neighbor mode spacings, length N-1."""
        return np.diff(self.Omega)


def mode_basis(
    tb: TightBindingParams,
    cp: CouplingProfile,
    d: DisorderRealization | None = None,
) -> ModeBasis:
    """Diagonalize the bare chain and rotate the coupling profile."""
    h = chain_hamiltonian(tb, d)
    omega, vecs = np.linalg.eigh(h)
    vecs = fix_eigenvector_phases(vecs)
    g = cp.as_vector(tb.N)
    return ModeBasis(Omega=omega, d=vecs, G=vecs.T @ g)


def mode_couplings(cp: CouplingProfile, basis: ModeBasis) -> np.ndarray:
    """G_n = sum_s d_{s,n} g_s for an arbitrary profile in a given basis."""
    return basis.d.T @ cp.as_vector(basis.d.shape[0])


def superstrong_metrics(G: np.ndarray, Omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coupling-to-spacing ratios along the mode ladder.

    Returns ``(per_spacing, per_coupling)``:

    * ``per_spacing[k]`` = mean(|G_k|, |G_{k+1}|) / (Omega_{k+1} - Omega_k),
      one entry per gap (length N-1);
    * ``per_coupling[n]`` = |G_n| / mean of the adjacent spacings, one entry
      per mode (length N); the edge modes use their single spacing.

    Degenerate modes give infinite entries rather than an error.
    """
    G = np.abs(np.asarray(G, dtype=float))
    Omega = np.asarray(Omega, dtype=float)
    if np.any(np.diff(Omega) < 0):
        raise ValueError("mode frequencies must be ascending")
    gaps = np.diff(Omega)
    with np.errstate(divide="ignore"):
        per_spacing = 0.5 * (G[:-1] + G[1:]) / gaps
        mean_gap = np.empty_like(G)
        mean_gap[0] = gaps[0]
        mean_gap[-1] = gaps[-1]
        mean_gap[1:-1] = 0.5 * (gaps[:-1] + gaps[1:])
        per_coupling = G / mean_gap
    return per_spacing, per_coupling


def participation_direct(spectrum: DressedSpectrum) -> np.ndarray:
    """Squared qubit weight |u_m|^2 of each tracked branch: (K, N+1)."""
    return spectrum.atomic_weight


def participation_hellmann_feynman(spectrum: DressedSpectrum) -> np.ndarray:
    """|u_m|^2 from the slope of each branch against the bare qubit frequency.

    Central finite differences on the tracked frequencies (one-sided at the
    grid ends); second-order accurate in the grid step.
    """
    grid = spectrum.omega_q_grid
    if len(grid) < 2:
        raise ValueError("need at least two grid points to differentiate")
    return np.gradient(spectrum.omega_tilde, grid, axis=0)


def modes_to_csv(path, basis: ModeBasis) -> None:
    """Per-mode table: index, frequency, coupling, both superstrong metrics."""
    per_spacing, per_coupling = superstrong_metrics(basis.G, basis.Omega)
    # spacing metric reported on the mode grid: adjacent-gap mean, as above
    n = len(basis.Omega)
    spacing_on_modes = np.full(n, np.nan)
    spacing_on_modes[:-1] = per_spacing
    data = np.column_stack(
        [np.arange(1, n + 1), basis.Omega, basis.G, spacing_on_modes, per_coupling]
    )
    np.savetxt(
        path,
        data,
        delimiter=",",
        header="n,Omega_GHz,G_GHz,G_over_spacing,G_over_mean_spacing",
        comments="",
    )
