"""Capacitance-matrix construction and hopping-model derivation."""

import numpy as np
import pytest

from ccaqed.circuit import (
    build_capacitance_matrix,
    derive_tight_binding,
    exact_cca_frequencies,
)
from ccaqed.params import CircuitParams, golden_circuit

FF = 1e-15
NH = 1e-9


def small_params(**kw):
    base = dict(L_g=16.8 * NH, C_g=23.0 * FF, C_1=2.0 * FF, C_2=3.0 * FF, N=6)
    base.update(kw)
    return CircuitParams(**base)


def test_capacitance_matrix_structure_small_chain():
    p = small_params()
    C = build_capacitance_matrix(p)
    # off-diagonal pattern alternates C_1, C_2 starting with C_1
    off = np.diag(C, 1)
    assert np.allclose(off, -np.array([2.0, 3.0, 2.0, 3.0, 2.0]) * FF)
    # interior diagonal = ground + both neighbors, edges miss one
    assert C[0, 0] == pytest.approx((23.0 + 2.0) * FF)
    assert C[1, 1] == pytest.approx((23.0 + 2.0 + 3.0) * FF)
    assert C[5, 5] == pytest.approx((23.0 + 2.0) * FF)


def test_capacitance_matrix_symmetric():
    C = build_capacitance_matrix(golden_circuit())
    assert np.max(np.abs(C - C.T)) < 1e-30


def test_capacitance_matrix_stray_bands():
    p = small_params(C_p1=0.4 * FF, C_p2=0.1 * FF)
    C = build_capacitance_matrix(p)
    assert np.allclose(np.diag(C, 2), -0.4 * FF)
    assert np.allclose(np.diag(C, 3), -0.1 * FF)
    # diagonal picks up the incident stray capacitances
    assert C[2, 2] == pytest.approx((23.0 + 2.0 + 3.0 + 2 * 0.4 + 2 * 0.1) * FF)


def test_uniform_c_sigma_diagonal():
    p = small_params(C_p1=0.4 * FF)
    C = build_capacitance_matrix(p, uniform_c_sigma=True)
    interior = (23.0 + 2.0 + 3.0 + 2 * 0.4) * FF
    assert np.allclose(np.diag(C), interior)


def test_homogeneous_chain_matches_cosine_band():
    # equal couplings, uniform diagonal: open-chain band
    # omega_n = omega_r sqrt(1 - 2 beta cos(n pi/(N+1))) ~ omega_r - 2 J cos(...)
    c = 1.0 * FF
    p = small_params(C_1=c, C_2=c, N=10)
    tb = derive_tight_binding(p)
    freqs = exact_cca_frequencies(p, uniform_c_sigma=True)
    n = np.arange(1, 11)
    expected = np.sort(tb.omega_r - 2 * tb.J1 * np.cos(n * np.pi / 11))
    beta = tb.beta[0]
    assert np.max(np.abs(freqs - expected)) / tb.omega_r < 3 * beta**2


def test_derive_tight_binding_relations():
    p = golden_circuit()
    tb = derive_tight_binding(p)
    # omega_r = 1/(2 pi sqrt(L C_sigma)) by construction
    assert tb.omega_r == pytest.approx(
        1.0 / (2 * np.pi * np.sqrt(p.L_g * tb.C_sigma)) / 1e9, rel=1e-12
    )
    assert tb.Z_r == pytest.approx(np.sqrt(p.L_g / tb.C_sigma), rel=1e-12)
    # J ratios follow capacitance ratios exactly
    assert tb.J1 / tb.J2 == pytest.approx(p.C_1 / p.C_2, rel=1e-12)
    assert tb.J1 == pytest.approx(tb.omega_r * p.C_1 / (2 * tb.C_sigma), rel=1e-12)
    assert tb.higher[2] == 0.0


def test_exact_frequencies_positive_sorted():
    freqs = exact_cca_frequencies(golden_circuit())
    assert np.all(freqs > 0)
    assert np.all(np.diff(freqs) >= 0)
    assert len(freqs) == 44


def test_stray_capacitance_breaks_band_symmetry():
    # without strays the two bands are mirror images about omega_r in the
    # hopping picture; second-neighbor terms skew the exact spectrum
    p0 = small_params(N=20)
    p1 = small_params(N=20, C_p1=0.5 * FF)
    f0 = exact_cca_frequencies(p0, uniform_c_sigma=True)
    f1 = exact_cca_frequencies(p1, uniform_c_sigma=True)
    skew0 = abs((f0[-1] - np.median(f0)) - (np.median(f0) - f0[0]))
    skew1 = abs((f1[-1] - np.median(f1)) - (np.median(f1) - f1[0]))
    assert skew1 > skew0 + 1e-4


def test_validation_errors():
    with pytest.raises(ValueError):
        CircuitParams(L_g=16.8 * NH, C_g=23 * FF, C_1=2 * FF, C_2=3 * FF, N=5)
    with pytest.raises(ValueError):
        CircuitParams(L_g=-1.0, C_g=23 * FF, C_1=2 * FF, C_2=3 * FF, N=6)
    with pytest.raises(ValueError):
        CircuitParams(L_g=16.8 * NH, C_g=23 * FF, C_1=2 * FF, C_2=3 * FF, C_p1=-1 * FF, N=6)
