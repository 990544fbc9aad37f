"""Site-basis single-excitation Hamiltonians and tracked eigenspectra.

The one-excitation sector of chain + qubit is an (N+1) x (N+1) real
symmetric matrix: sites 0..N-1 first, qubit amplitude last.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .params import (
    CouplingProfile,
    DisorderRealization,
    QubitParams,
    TightBindingParams,
)

__all__ = [
    "qubit_frequency",
    "chain_hamiltonian",
    "build_hamiltonian",
    "fix_eigenvector_phases",
    "sweep_and_track",
    "DressedSpectrum",
]


def qubit_frequency(q: QubitParams) -> float:
    """Transmon frequency (GHz) from the flux-dependent Josephson energy.

    omega_q = sqrt(8 E_C E_J0 |cos(pi Phi/Phi_0)|) - E_C.  Undefined at the
    flux where the junction energy vanishes.
    """
    ej = q.E_J0 * abs(np.cos(np.pi * q.flux))
    if ej <= 1e-9 * q.E_J0:
        raise ValueError(
            f"Josephson energy vanishes at reduced flux {q.flux}; the "
            "transmon approximation gives no transition frequency there"
        )
    if ej / q.E_C < 20:
        warnings.warn("E_J/E_C below 20: outside the transmon regime", stacklevel=2)
    return float(np.sqrt(8.0 * q.E_C * ej) - q.E_C)


def chain_hamiltonian(
    tb: TightBindingParams, d: DisorderRealization | None = None
) -> np.ndarray:
    """Bare N x N chain Hamiltonian (GHz) with staggered and higher hoppings."""
    n = tb.N
    h = np.zeros((n, n))
    omega = np.full(n, tb.omega_r)
    if d is not None:
        delta = d.as_vector()
        if delta.shape != (n,):
            raise ValueError("disorder vector length does not match the chain")
        omega = omega + delta
    h[np.diag_indices(n)] = omega
    idx = np.arange(n - 1)
    nn = np.where(idx % 2 == 0, tb.J1, tb.J2)
    h[idx, idx + 1] = nn
    h[idx + 1, idx] = nn
    for q, j in enumerate(tb.higher, start=2):
        if j == 0.0 or n <= q:
            continue
        idx = np.arange(n - q)
        h[idx, idx + q] = j
        h[idx + q, idx] = j
    return h


def build_hamiltonian(
    tb: TightBindingParams,
    omega_q: float,
    cp: CouplingProfile,
    d: DisorderRealization | None = None,
) -> np.ndarray:
    """(N+1) x (N+1) single-excitation Hamiltonian; qubit is the last index."""
    n = tb.N
    h = np.zeros((n + 1, n + 1))
    h[:n, :n] = chain_hamiltonian(tb, d)
    g = cp.as_vector(n)
    h[:n, n] = g
    h[n, :n] = g
    h[n, n] = omega_q
    return h


def fix_eigenvector_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real-positive."""
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


@dataclass
class DressedSpectrum:
    """Eigenpairs tracked across a qubit-frequency sweep.

    ``omega_tilde[k, m]`` is the frequency of branch m at grid point k;
    branch identity follows eigenvector overlap, not sorted order.
    ``eigvecs[k, :, m]`` is the matching eigenvector (sites then qubit).
    """

    omega_q_grid: np.ndarray  # (K,) bare qubit frequencies (GHz)
    omega_tilde: np.ndarray  # (K, N+1) tracked dressed frequencies (GHz)
    eigvecs: np.ndarray  # (K, N+1, N+1) tracked eigenvectors
    warnings: list[str]

    @property
    def atomic_weight(self) -> np.ndarray:
        """|u_m|^2 per grid point and branch: (K, N+1)."""
        return np.abs(self.eigvecs[:, -1, :]) ** 2

    @property
    def photonic_weights(self) -> np.ndarray:
        """|c_{s,m}|^2 per grid point, site and branch: (K, N, N+1)."""
        return np.abs(self.eigvecs[:, :-1, :]) ** 2

    def branch_closest_to(self, k: int, freq: float) -> int:
        return int(np.argmin(np.abs(self.omega_tilde[k] - freq)))

    def to_csv(self, path) -> None:
        """One row per grid point: omega_q, dressed frequencies, |u_m|^2."""
        nb = self.omega_tilde.shape[1]
        header = (
            ["omega_q_GHz"]
            + [f"omega_tilde_{m+1}_GHz" for m in range(nb)]
            + [f"u2_{m+1}" for m in range(nb)]
        )
        data = np.hstack([self.omega_q_grid[:, None], self.omega_tilde, self.atomic_weight])
        np.savetxt(path, data, delimiter=",", header=",".join(header), comments="")


def sweep_and_track(
    tb: TightBindingParams,
    cp: CouplingProfile,
    omega_q_grid: np.ndarray,
    d: DisorderRealization | None = None,
    ambiguity_tol: float = 1e-3,
) -> DressedSpectrum:
    """Diagonalize over a qubit-frequency grid and track branch identity.

    Consecutive grid points are matched by maximal eigenvector overlap
    (optimal assignment); ties closer than ``ambiguity_tol`` are recorded as
    warnings in the output metadata.
    """
    grid = np.asarray(omega_q_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 1:
        raise ValueError("grid must be a non-empty 1-D array")
    steps = np.diff(grid)
    if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("grid must be strictly monotone")

    nb = tb.N + 1
    freqs = np.empty((len(grid), nb))
    vecs = np.empty((len(grid), nb, nb))
    notes: list[str] = []

    prev = None
    for k, wq in enumerate(grid):
        h = build_hamiltonian(tb, wq, cp, d)
        vals, v = np.linalg.eigh(h)
        v = fix_eigenvector_phases(v)
        if prev is None:
            order = np.arange(nb)
        else:
            overlap = np.abs(prev.T @ v)  # (branch, new eigvec)
            row, col = linear_sum_assignment(-overlap)
            order = np.empty(nb, dtype=int)
            order[row] = col
            # flag near-ties: a second candidate within tolerance of the best
            for b in range(nb):
                best = overlap[b, order[b]]
                overlap[b, order[b]] = -np.inf
                runner = overlap[b].max()
                if best - runner < ambiguity_tol:
                    notes.append(
                        f"ambiguous tracking of branch {b} at grid point {k} "
                        f"(overlap gap {best - runner:.2e})"
                    )
        freqs[k] = vals[order]
        vecs[k] = v[:, order]
        prev = vecs[k]
    return DressedSpectrum(grid, freqs, vecs, notes)
