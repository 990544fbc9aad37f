"""Circuit quantization: lumped-element parameters -> hopping model.

The chain Hamiltonian in flux/charge variables is governed by the
capacitance matrix; its frequency matrix is sqrt(C^-1 L^-1).  The
linearized (first order in C_i/C_sigma) version is the staggered hopping
model with J_i = omega_r * beta_i / 2.
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg

from .params import CircuitParams, TightBindingParams

__all__ = [
    "build_capacitance_matrix",
    "exact_cca_frequencies",
    "derive_tight_binding",
]


def _coupling_bands(p: CircuitParams) -> list[tuple[int, np.ndarray]]:
    """(neighbor order, per-bond capacitance vector) for every order."""
    n = p.N
    nn = np.where(np.arange(n - 1) % 2 == 0, p.C_1, p.C_2)
    bands = [(1, nn)]
    for q, c in ((2, p.C_p1), (3, p.C_p2), (4, p.C_p3)):
        if n > q:
            bands.append((q, np.full(n - q, c)))
    return bands


def build_capacitance_matrix(p: CircuitParams, uniform_c_sigma: bool = False) -> np.ndarray:
    """Maxwell capacitance matrix of the chain.

    Diagonal entries are the total capacitance of each site (ground plus all
    incident coupling/stray capacitances); off-diagonals are the negated
    coupling capacitances.  Edge sites miss some neighbors, so their row sums
    differ; ``uniform_c_sigma=True`` instead forces every diagonal to the
    interior value (the convention of a homogeneous-frequency fit).
    """
    n = p.N
    C = np.zeros((n, n))
    for q, cvec in _coupling_bands(p):
        idx = np.arange(n - q)
        C[idx, idx + q] -= cvec
        C[idx + q, idx] -= cvec
    incident = -C.sum(axis=1)
    C[np.diag_indices(n)] = p.C_g + incident
    if uniform_c_sigma:
        interior = p.C_g + p.C_1 + p.C_2 + 2 * (p.C_p1 + p.C_p2 + p.C_p3)
        C[np.diag_indices(n)] = interior
    return C


def exact_cca_frequencies(
    p: CircuitParams, uniform_c_sigma: bool = False
) -> np.ndarray:
    """Sorted mode frequencies (GHz) of sqrt(C^-1 L^-1) / 2pi.

    Solved as the symmetric generalized eigenproblem
    (1/L_g) v = omega^2 C v, which guarantees a real positive spectrum.
    """
    C = build_capacitance_matrix(p, uniform_c_sigma=uniform_c_sigma)
    try:
        w2 = scipy.linalg.eigh(np.eye(p.N) / p.L_g, C, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:
        raise ValueError("capacitance matrix is singular") from exc
    if w2.min() <= 0:
        raise ValueError("capacitance matrix is singular or indefinite")
    return np.sort(np.sqrt(w2)) / (2 * np.pi) / 1e9


def derive_tight_binding(p: CircuitParams) -> TightBindingParams:
    """Linearized hopping parameters from the circuit record.

    Uses the interior (full-neighborhood) total capacitance, so
    omega_r = 1/(2pi sqrt(L_g C_sigma)) holds by construction.
    """
    c_sigma = p.C_g + p.C_1 + p.C_2 + 2 * (p.C_p1 + p.C_p2 + p.C_p3)
    caps = (p.C_1, p.C_2, p.C_p1, p.C_p2, p.C_p3)
    beta = tuple(c / c_sigma for c in caps)
    if max(beta) > 0.2:
        warnings.warn(
            "coupling/total capacitance ratio above 0.2; the linearized "
            "hopping model is unreliable at this ratio",
            stacklevel=2,
        )
    omega_r = 1.0 / (2 * np.pi * np.sqrt(p.L_g * c_sigma)) / 1e9
    z_r = float(np.sqrt(p.L_g / c_sigma))
    J = tuple(omega_r * b / 2 for b in beta)
    return TightBindingParams(
        omega_r=omega_r, Z_r=z_r, J=J, N=p.N, C_sigma=c_sigma, beta=beta
    )
