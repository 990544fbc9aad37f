"""Open-system statics: non-Hermitian rates, reflection fits, Purcell, Stark.

All dissipation rates are ordinary frequencies (GHz) like everything else;
SI conversions happen only inside the Purcell/photon-number formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.optimize

from .modes import ModeBasis
from .params import LossModel

__all__ = [
    "ModeRates",
    "ReflectionTraceParams",
    "build_non_hermitian",
    "extract_mode_rates",
    "reflection_spectrum",
    "fit_reflection",
    "disorder_ensemble",
    "DisorderBands",
    "PurcellBudget",
    "purcell_budget",
    "ac_stark_model",
]

HBAR = 1.054571817e-34  # J s


def build_non_hermitian(
    H: np.ndarray, lm: LossModel, n_sites: int | None = None
) -> np.ndarray:
    """Attach -i/2 loss terms to a site-basis Hamiltonian.

    ``n_sites`` is the number of chain sites; any extra trailing index is the
    qubit (default: last index).  Edge and second sites that share a port get
    the dissipative cross term -i/2 * c * sqrt(kappa kappa') with
    c = ``lm.cross_term_factor``.
    """
    n = H.shape[0]
    if n_sites is None:
        n_sites = n - 1
    if not 2 <= n_sites <= n:
        raise ValueError("n_sites incompatible with the Hamiltonian dimension")
    hnh = H.astype(complex).copy()
    half = -0.5j
    diag = np.zeros(n)
    diag[:n_sites] += lm.kappa_int
    diag[0] += lm.kappa_ext_L
    diag[1] += lm.kappa_ext_Lp
    diag[n_sites - 1] += lm.kappa_ext_R
    diag[n_sites - 2] += lm.kappa_ext_Rp
    if n_sites < n:
        diag[n_sites:] += lm.kappa_q
    hnh[np.diag_indices(n)] += half * diag
    c = lm.cross_term_factor
    cross_l = half * c * np.sqrt(lm.kappa_ext_L * lm.kappa_ext_Lp)
    cross_r = half * c * np.sqrt(lm.kappa_ext_R * lm.kappa_ext_Rp)
    hnh[0, 1] += cross_l
    hnh[1, 0] += cross_l
    hnh[n_sites - 1, n_sites - 2] += cross_r
    hnh[n_sites - 2, n_sites - 1] += cross_r
    return hnh


@dataclass(frozen=True)
class ModeRates:
    """Per-mode dissipation rates from non-Hermitian diagonalizations.

    ``chi_db`` = 10 log10(gamma_ext_R/gamma_ext_L); +inf/-inf encode a
    one-sided mode (one external rate numerically zero).
    """

    omega: np.ndarray  # mode frequencies, Re(lambda) (GHz)
    gamma_tot: np.ndarray  # -2 Im(lambda) of the full model (GHz)
    gamma_int: np.ndarray  # internal-only rates (GHz)
    gamma_ext_L: np.ndarray  # left-port-only rates (GHz)
    gamma_ext_R: np.ndarray  # right-port-only rates (GHz)

    @property
    def chi_db(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 10.0 * np.log10(self.gamma_ext_R / self.gamma_ext_L)

    def to_csv(self, path) -> None:
        data = np.column_stack(
            [
                np.arange(1, len(self.omega) + 1),
                self.omega,
                self.gamma_tot,
                self.gamma_int,
                self.gamma_ext_L,
                self.gamma_ext_R,
                self.chi_db,
            ]
        )
        np.savetxt(
            path,
            data,
            delimiter=",",
            header="m,omega_GHz,gamma_tot_GHz,gamma_int_GHz,"
            "gamma_ext_L_GHz,gamma_ext_R_GHz,chi_dB",
            comments="",
        )


def _matched_rates(H: np.ndarray, lm: LossModel, ref_vecs: np.ndarray, n_sites) -> tuple:
    """Diagonalize the lossy model and order modes by overlap with ref_vecs."""
    vals, vecs = scipy.linalg.eig(build_non_hermitian(H, lm, n_sites))
    overlap = np.abs(ref_vecs.conj().T @ vecs)
    row, col = scipy.optimize.linear_sum_assignment(-overlap)
    order = np.empty(len(vals), dtype=int)
    order[row] = col
    return vals[order]


def extract_mode_rates(
    H: np.ndarray, lm: LossModel, n_sites: int | None = None
) -> ModeRates:
    """Selective-zeroing rate extraction: gamma_m = -2 Im(lambda_m).

    Four diagonalizations — full, internal-only, left-port-only and
    right-port-only — matched mode-by-mode against the Hermitian eigenbasis.
    """
    _, ref = np.linalg.eigh(H)
    full = _matched_rates(H, lm, ref, n_sites)
    int_only = _matched_rates(
        H, lm.zeroed("kappa_ext_L", "kappa_ext_R", "kappa_ext_Lp", "kappa_ext_Rp"),
        ref, n_sites,
    )
    left_only = _matched_rates(
        H, lm.zeroed("kappa_int", "kappa_q", "kappa_ext_R", "kappa_ext_Rp"),
        ref, n_sites,
    )
    right_only = _matched_rates(
        H, lm.zeroed("kappa_int", "kappa_q", "kappa_ext_L", "kappa_ext_Lp"),
        ref, n_sites,
    )
    rate = lambda lam: np.maximum(-2.0 * lam.imag, 0.0)
    return ModeRates(
        omega=full.real,
        gamma_tot=rate(full),
        gamma_int=rate(int_only),
        gamma_ext_L=rate(left_only),
        gamma_ext_R=rate(right_only),
    )


@dataclass(frozen=True)
class ReflectionTraceParams:
    """Single-mode two-port reflection model parameters (rates in GHz)."""

    omega_m: float  # resonance frequency (GHz)
    gamma_ext_L: float
    gamma_ext_R: float
    gamma_int: float
    A_L: float = 1.0  # baseline amplitude, left trace
    A_R: float = 1.0
    alpha_L: float = 0.0  # baseline phase (rad)
    alpha_R: float = 0.0
    phi_L: float = 0.0  # impedance-mismatch angle (rad)
    phi_R: float = 0.0

    def __post_init__(self):
        if self.A_L <= 0 or self.A_R <= 0:
            raise ValueError("baseline amplitudes must be positive")


def reflection_spectrum(
    p: ReflectionTraceParams, omega: np.ndarray, port: str = "L"
) -> np.ndarray:
    """Complex reflection trace S_pp(omega) of a single mode.

    S = A e^{-i alpha} (1 - gamma_port e^{i phi} /
        (i(omega - omega_m) + gamma_tot/2)) with
    gamma_tot = gamma_ext_L + gamma_ext_R + gamma_int.
    """
    omega = np.asarray(omega, dtype=float)
    if port == "L":
        a, alpha, phi, g_p = p.A_L, p.alpha_L, p.phi_L, p.gamma_ext_L
    elif port == "R":
        a, alpha, phi, g_p = p.A_R, p.alpha_R, p.phi_R, p.gamma_ext_R
    else:
        raise ValueError("port must be 'L' or 'R'")
    g_tot = p.gamma_ext_L + p.gamma_ext_R + p.gamma_int
    lorentz = g_p * np.exp(1j * phi) / (1j * (omega - p.omega_m) + g_tot / 2.0)
    return a * np.exp(-1j * alpha) * (1.0 - lorentz)


def _seed_from_trace(omega, trace):
    """Crude (omega_m, gamma_tot, gamma_port, A, alpha) guess for one trace."""
    mag = np.abs(trace)
    i0 = int(np.argmin(mag))
    baseline = np.median(np.concatenate([mag[: len(mag) // 10 + 1], mag[-len(mag) // 10 - 1 :]]))
    depth = mag[i0] / baseline
    half = (mag[i0] + baseline) / 2.0
    below = np.where(mag <= half)[0]
    if len(below) >= 2:
        width = omega[below[-1]] - omega[below[0]]
    else:
        width = (omega[-1] - omega[0]) / 10.0
    g_tot = max(width, 1e-9)
    g_port = 0.5 * g_tot * (1.0 - depth)
    edge_phase = np.angle(trace[0])
    return omega[i0], g_tot, max(g_port, 1e-9), baseline, -edge_phase


def fit_reflection(
    omega: np.ndarray, trace_L: np.ndarray, trace_R: np.ndarray
) -> ReflectionTraceParams:
    """Joint complex-plane least squares on left and right traces.

    A single trace cannot separate the far-port rate from the internal rate,
    so both traces are required.
    """
    w_m, g_tot_l, g_l, a_l, al_l = _seed_from_trace(omega, trace_L)
    _, g_tot_r, g_r, a_r, al_r = _seed_from_trace(omega, trace_R)
    g_tot = 0.5 * (g_tot_l + g_tot_r)
    g_int = max(g_tot - g_l - g_r, 1e-9)

    def unpack(x):
        return ReflectionTraceParams(
            omega_m=x[0],
            gamma_ext_L=abs(x[1]),
            gamma_ext_R=abs(x[2]),
            gamma_int=abs(x[3]),
            A_L=abs(x[4]),
            A_R=abs(x[5]),
            alpha_L=x[6],
            alpha_R=x[7],
            phi_L=x[8],
            phi_R=x[9],
        )

    def residuals(x):
        p = unpack(x)
        r_l = reflection_spectrum(p, omega, "L") - trace_L
        r_r = reflection_spectrum(p, omega, "R") - trace_R
        r = np.concatenate([r_l, r_r])
        return np.concatenate([r.real, r.imag])

    x0 = [w_m, g_l, g_r, g_int, a_l, a_r, al_l, al_r, 0.0, 0.0]
    res = scipy.optimize.least_squares(residuals, x0, method="lm", max_nfev=20000)
    if not res.success:
        raise RuntimeError(
            f"reflection fit did not converge (final residual {res.cost:.3e})"
        )
    return unpack(res.x)


@dataclass(frozen=True)
class DisorderBands:
    """Ensemble statistics of per-mode rates over disorder realizations."""

    mean: ModeRates
    lower: ModeRates  # low percentile
    upper: ModeRates  # high percentile
    percentiles: tuple[float, float]
    n_realizations: int
    seed: int


def disorder_ensemble(
    build_h,
    lm: LossModel,
    n_sites: int,
    sigma: float,
    n_realizations: int,
    seed: int = 0,
    percentiles: tuple[float, float] = (18.57, 84.13),
) -> DisorderBands:
    """Percentile bands of mode rates under Gaussian on-site disorder.

    ``build_h(realization)`` maps a DisorderRealization over ``n_sites``
    chain sites to a Hamiltonian (with or without a trailing qubit index);
    realizations are seeded deterministically from the master seed.
    """
    from .params import DisorderRealization

    if n_realizations < 1:
        raise ValueError("need at least one realization")
    h0 = build_h(DisorderRealization.none(n_sites))
    n_modes = h0.shape[0]
    fields = ("omega", "gamma_tot", "gamma_int", "gamma_ext_L", "gamma_ext_R")
    acc = {f: np.empty((n_realizations, n_modes)) for f in fields}
    master = np.random.default_rng(seed)
    child_seeds = master.integers(0, 2**63 - 1, size=n_realizations)
    for k in range(n_realizations):
        d = DisorderRealization.gaussian(n_sites, sigma, seed=int(child_seeds[k]))
        rates = extract_mode_rates(build_h(d), lm, n_sites)
        for f in fields:
            acc[f][k] = getattr(rates, f)

    def reduce(fn):
        return ModeRates(**{f: fn(acc[f]) for f in fields})

    lo, hi = percentiles
    return DisorderBands(
        mean=reduce(lambda a: a.mean(axis=0)),
        lower=reduce(lambda a: np.percentile(a, lo, axis=0)),
        upper=reduce(lambda a: np.percentile(a, hi, axis=0)),
        percentiles=percentiles,
        n_realizations=n_realizations,
        seed=seed,
    )


@dataclass(frozen=True)
class PurcellBudget:
    """Qubit decay rates per channel, ordinary frequency (GHz)."""

    omega_q: np.ndarray
    drive: np.ndarray
    readout: np.ndarray
    cca: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.drive + self.readout + self.cca

    @staticmethod
    def t1_us(gamma_ghz) -> np.ndarray:
        """Lifetime (microseconds) of an ordinary-frequency rate in GHz."""
        return 1.0 / (2 * np.pi * np.asarray(gamma_ghz) * 1e3)


def purcell_budget(
    omega_q_grid: np.ndarray,
    basis: ModeBasis,
    mode_rates: ModeRates,
    C_c: float = 0.5e-15,
    C_sigma_q: float = 60.9e-15,
    Z0: float = 50.0,
    omega_RO: float = 4.60,
    g_RO: float = 0.089,
    gamma_RO_ext: float = 1.64e-3,
    gamma_RO_int: float = 330e-6,
) -> PurcellBudget:
    """Drive-line, readout and chain contributions to qubit decay.

    Drive line: gamma = omega^2 Z0 C_c^2 / C_Sigma (SI, angular), converted
    to GHz.  Readout: (gamma_RO,ext+gamma_RO,int)(g/Delta)^2.  Chain:
    sum_n (gamma_n,int+gamma_n,ext)(G_n/Delta_n)^2.  Grid points resonant
    with the readout or a chain mode raise.
    """
    wq = np.asarray(omega_q_grid, dtype=float)
    w_si = 2 * np.pi * wq * 1e9
    drive = (w_si**2 * Z0 * C_c**2 / C_sigma_q) / (2 * np.pi * 1e9)

    delta_ro = wq - omega_RO
    if np.any(delta_ro == 0.0):
        raise ValueError("grid point resonant with the readout resonator")
    readout = (gamma_RO_ext + gamma_RO_int) * (g_RO / delta_ro) ** 2

    delta_n = basis.Omega[None, :] - wq[:, None]
    if np.any(delta_n == 0.0):
        raise ValueError("grid point resonant with a chain mode")
    g_n = mode_rates.gamma_int + mode_rates.gamma_ext_L + mode_rates.gamma_ext_R
    cca = np.sum(g_n[None, :] * (basis.G[None, :] / delta_n) ** 2, axis=1)
    return PurcellBudget(omega_q=wq, drive=drive, readout=readout, cca=cca)


def ac_stark_model(
    P_in: float,
    attenuation: float,
    omega_m: float,
    chi_m: float,
    gamma_ext_port: float,
    gamma_ext_other: float,
    gamma_int,
    omega_q0: float,
    tol: float = 1e-12,
    max_iter: int = 1000,
) -> tuple[float, float]:
    """Self-consistent photon number and shifted qubit frequency.

    n = gamma_port * F / ((gamma_int(n) + gamma_L + gamma_R)/2)^2 with input
    photon flux F = P_in * attenuation / (hbar omega_m); the qubit shifts by
    2 chi_m n.  ``gamma_int`` may be a constant, a callable of n, or
    tabulated (n, gamma) pairs (linearly interpolated).
    """
    if P_in < 0 or attenuation < 0:
        raise ValueError("power and attenuation must be non-negative")
    if callable(gamma_int):
        g_int = gamma_int
    elif np.isscalar(gamma_int):
        g_int = lambda n: float(gamma_int)
    else:
        tab = np.asarray(gamma_int, dtype=float)
        g_int = lambda n: float(np.interp(n, tab[:, 0], tab[:, 1]))

    flux = P_in * attenuation / (HBAR * 2 * np.pi * omega_m * 1e9)  # photons/s
    to_si = 2 * np.pi * 1e9  # ordinary GHz -> angular 1/s
    n = 0.0
    for _ in range(max_iter):
        g_tot = (g_int(n) + gamma_ext_port + gamma_ext_other) * to_si
        n_new = gamma_ext_port * to_si * flux / (g_tot / 2.0) ** 2
        if abs(n_new - n) <= tol * max(1.0, abs(n_new)):
            return n_new, omega_q0 + 2 * chi_m * n_new
        n = n_new
    raise RuntimeError(f"photon-number fixed point did not converge (n={n:.3g})")
