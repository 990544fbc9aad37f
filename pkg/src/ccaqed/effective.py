"""Dispersive (second-order) effective model of the qubit-chain system.

Eliminating the qubit-mode coupling to second order shifts every mode by
-G_n^2/Delta_n, shifts the qubit by the opposite total, and generates
qubit-mediated photon-photon couplings between modes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .modes import ModeBasis

__all__ = ["EffectiveModel", "schrieffer_wolff", "effective_spectrum"]


@dataclass(frozen=True)
class EffectiveModel:
    """Second-order effective parameters in the bare mode basis."""

    Omega_eff: np.ndarray  # shifted mode frequencies (GHz)
    omega_q_eff: float  # shifted qubit frequency (GHz)
    Gnn: np.ndarray  # symmetric mode-mode couplings, zero diagonal (GHz)
    max_ratio: float  # max |G_n/Delta_n|, the small parameter


def schrieffer_wolff(
    basis: ModeBasis, omega_q: float, ratio_guard: float = 0.3
) -> EffectiveModel:
    """Second-order elimination of the qubit-mode coupling.

    With Delta_n = Omega_n - omega_q the shifts are
    Omega_n^eff = Omega_n + G_n^2/Delta_n (modes repelled away from the
    qubit), omega_q^eff = omega_q - sum G_n^2/Delta_n, and the induced
    mode-mode coupling is G_n G_n' (Delta_n+Delta_n')/(2 Delta_n Delta_n').
    Valid for a qubit off-resonant from every mode; warns when the expansion
    parameter max|G_n/Delta_n| exceeds ``ratio_guard``.
    """
    delta = basis.detunings(omega_q)
    if np.any(delta == 0.0):
        n = int(np.argwhere(delta == 0.0)[0])
        raise ValueError(f"qubit exactly resonant with mode {n}; no dispersive limit")
    g = basis.G
    ratio = float(np.max(np.abs(g / delta)))
    if ratio > ratio_guard:
        warnings.warn(
            f"max |G/Delta| = {ratio:.3f} exceeds {ratio_guard}; second-order "
            "model unreliable",
            stacklevel=2,
        )
    shifts = g**2 / delta
    gnn = np.outer(g, g) * (delta[:, None] + delta[None, :]) / (
        2.0 * np.outer(delta, delta)
    )
    np.fill_diagonal(gnn, 0.0)
    return EffectiveModel(
        Omega_eff=basis.Omega + shifts,
        omega_q_eff=omega_q - float(shifts.sum()),
        Gnn=gnn,
        max_ratio=ratio,
    )


def effective_spectrum(model: EffectiveModel) -> np.ndarray:
    """Eigenfrequencies of the photonic block (qubit decoupled at this order)."""
    h = np.diag(model.Omega_eff) + model.Gnn
    return np.linalg.eigvalsh(h)
