"""Command-line entry point: run a named scenario from a config file.

Usage: ccaqed <scenario> --config <file> --out <dir> [--workers N]
       [--seed S] [--set section.key=value ...]

Each scenario writes CSV data files (units recorded in a '# units:' comment
line), a JSON manifest with all resolved parameters and seeds, and a short
human-readable summary.  Exit codes: 0 success, 2 validation failure,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

import numpy as np

from .analysis import fft_map, spectrogram, transmission_map
from .config import ConfigError, RunConfig, load_config
from .dynamics import emission_protocol, quench_scan
from .lattice import sweep_and_track
from .modes import (
    mode_basis,
    participation_direct,
    participation_hellmann_feynman,
    superstrong_metrics,
)
from .chirality import chirality_quantifier
from .openloss import (
    ReflectionTraceParams,
    ac_stark_model,
    disorder_ensemble,
    extract_mode_rates,
    fit_reflection,
    purcell_budget,
    reflection_spectrum,
)
from .lattice import build_hamiltonian

SCENARIOS = (
    "spectrum",
    "participation",
    "superstrong-dynamics",
    "chirality-map",
    "dissipation-ensemble",
    "emission",
    "purcell",
    "ac-stark",
    "fit-roundtrip",
)


def write_csv(path, columns, units, data):
    """CSV with a '# units:' comment line above the header row."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[1] != len(columns) or len(units) != len(columns):
        raise ValueError("column/units/data width mismatch")
    with open(path, "w") as fh:
        fh.write("# units: " + ",".join(units) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in data:
            fh.write(",".join(format(v, ".12g") for v in row) + "\n")


def _scn(cfg: RunConfig, key, conv=float, default=None):
    raw = cfg.scenario.get(key)
    if raw is None:
        if default is not None:
            return default
        raise ConfigError(f"[scenario] missing key {key!r}")
    try:
        return conv(raw)
    except ValueError as e:
        raise ConfigError(f"[scenario] bad value for {key!r}: {e}") from None


def _run_spectrum(cfg, out, workers, results):
    basis = mode_basis(cfg.tb, cfg.cp)
    per_spacing, per_coupling = superstrong_metrics(basis.G, basis.Omega)
    n = cfg.tb.N
    write_csv(
        out / "band_structure.csv",
        ["n", "Omega_GHz", "G_GHz", "g_over_spacing", "g_over_omega"],
        ["1", "GHz", "GHz", "1", "1"],
        np.column_stack(
            [
                np.arange(n),
                basis.Omega,
                basis.G,
                np.r_[per_spacing, np.nan],
                np.abs(basis.G) / basis.Omega,
            ]
        ),
    )
    grid = cfg.omega_q_grid()
    spec = sweep_and_track(cfg.tb, cfg.cp, grid)
    nb = n + 1
    cols = (
        ["omega_q_GHz"]
        + [f"omega_tilde_{m}_GHz" for m in range(nb)]
        + [f"u2_{m}" for m in range(nb)]
    )
    units = ["GHz"] + ["GHz"] * nb + ["1"] * nb
    write_csv(
        out / "dressed_modes.csv",
        cols,
        units,
        np.hstack([grid[:, None], spec.omega_tilde, spec.atomic_weight]),
    )
    results["branches"] = nb
    results["tracking_warnings"] = spec.warnings
    return ["band_structure.csv", "dressed_modes.csv"]


def _run_participation(cfg, out, workers, results):
    grid = cfg.omega_q_grid()
    spec = sweep_and_track(cfg.tb, cfg.cp, grid)
    direct = participation_direct(spec)
    hf = participation_hellmann_feynman(spec)
    nb = cfg.tb.N + 1
    rows = []
    for k, wq in enumerate(grid):
        for m in range(nb):
            rows.append((wq, m, spec.omega_tilde[k, m], direct[k, m], hf[k, m]))
    write_csv(
        out / "participation.csv",
        ["omega_q_GHz", "branch", "omega_tilde_GHz", "u2_direct", "u2_slope"],
        ["GHz", "1", "GHz", "1", "1"],
        rows,
    )
    results["max_method_gap"] = float(np.nanmax(np.abs(direct - hf)))
    return ["participation.csv"]


def _run_superstrong(cfg, out, workers, results):
    init = _scn(cfg, "init_omega")
    targets = np.linspace(
        _scn(cfg, "target_min"), _scn(cfg, "target_max"),
        _scn(cfg, "target_points", int),
    )
    tau_step = _scn(cfg, "tau_step", default=1.0)
    taus = np.arange(tau_step, _scn(cfg, "tau_max") + tau_step / 2, tau_step)
    ramp = _scn(cfg, "ramp_time", default=2.4)
    rtol = _scn(cfg, "rtol", default=1e-8)
    pe = quench_scan(
        cfg.tb, cfg.cp, cfg.lm, init, targets, taus,
        ramp_time=ramp, rtol=rtol, workers=workers,
    )
    rows = [
        (targets[i], taus[j], pe[i, j])
        for i in range(len(targets))
        for j in range(len(taus))
    ]
    write_csv(
        out / "pe_map.csv",
        ["omega_target_GHz", "tau_ns", "P_e"],
        ["GHz", "ns", "1"],
        rows,
    )
    files = ["pe_map.csv"]
    if len(taus) >= 16:
        freqs, spec = fft_map(pe.T, tau_step)
        mag = np.abs(spec)
        rows = [
            (targets[i], freqs[k], mag[k, i])
            for i in range(len(targets))
            for k in range(len(freqs))
        ]
        write_csv(
            out / "fft_map.csv",
            ["omega_target_GHz", "frequency_GHz", "magnitude"],
            ["GHz", "GHz", "1"],
            rows,
        )
        files.append("fft_map.csv")
    results["pe_range"] = [float(pe.min()), float(pe.max())]
    return files


def _run_chirality_map(cfg, out, workers, results):
    grid = cfg.omega_q_grid()
    s0 = cfg.cp.center_site
    rows = []
    for wq in grid:
        h = build_hamiltonian(cfg.tb, wq, cfg.cp)
        rates = extract_mode_rates(h, cfg.lm, n_sites=cfg.tb.N)
        vals, vecs = np.linalg.eigh(h)
        for m in range(len(vals)):
            q = chirality_quantifier(vecs[:, m], s0, n_sites=cfg.tb.N)
            rows.append((wq, m, vals[m], q, rates.chi_db[m]))
    write_csv(
        out / "chirality_map.csv",
        ["omega_q_GHz", "mode", "omega_tilde_GHz", "Q", "chi_dB"],
        ["GHz", "1", "GHz", "1", "dB"],
        rows,
    )
    arr = np.asarray(rows)
    finite = np.isfinite(arr[:, 4])
    results["pinned_site"] = s0
    results["max_abs_chi_db"] = float(np.max(np.abs(arr[finite, 4]))) if finite.any() else None
    return ["chirality_map.csv"]


def _run_dissipation_ensemble(cfg, out, workers, results):
    seed = cfg.require_seed()
    sigma = cfg.sweep.get("sigma")
    n_real = cfg.sweep.get("n_realizations")
    if sigma is None or n_real is None:
        raise ConfigError("[sweep] needs sigma and n_realizations")
    omega_q = cfg.scenario.get("omega_q")

    def build_h(d):
        if omega_q is None:
            from .lattice import chain_hamiltonian

            return chain_hamiltonian(cfg.tb, d)
        return build_hamiltonian(cfg.tb, float(omega_q), cfg.cp, d)

    bands = disorder_ensemble(
        build_h, cfg.lm, cfg.tb.N, sigma, int(n_real), seed=seed
    )
    n_modes = len(bands.mean.omega)
    write_csv(
        out / "mode_rates.csv",
        [
            "m",
            "omega_GHz",
            "gamma_tot_GHz",
            "gamma_tot_lo_GHz",
            "gamma_tot_hi_GHz",
            "gamma_int_GHz",
            "gamma_ext_L_GHz",
            "gamma_ext_R_GHz",
            "chi_dB",
        ],
        ["1"] + ["GHz"] * 7 + ["dB"],
        np.column_stack(
            [
                np.arange(n_modes),
                bands.mean.omega,
                bands.mean.gamma_tot,
                bands.lower.gamma_tot,
                bands.upper.gamma_tot,
                bands.mean.gamma_int,
                bands.mean.gamma_ext_L,
                bands.mean.gamma_ext_R,
                bands.mean.chi_db,
            ]
        ),
    )
    results["percentiles"] = list(bands.percentiles)
    results["n_realizations"] = bands.n_realizations
    return ["mode_rates.csv"]


def _run_emission(cfg, out, workers, results):
    mode_index = _scn(cfg, "mode_index", int)
    omega_park = _scn(cfg, "omega_park")
    omega_emit = cfg.scenario.get("omega_emit")
    scan_window = None
    if omega_emit is None and "scan_min" in cfg.scenario:
        scan_window = np.linspace(
            _scn(cfg, "scan_min"), _scn(cfg, "scan_max"),
            _scn(cfg, "scan_points", int),
        )
    ideal = _scn(cfg, "ideal", lambda s: s.lower() in ("1", "true", "yes"),
                 default=False) if "ideal" in cfg.scenario else False
    swap = None
    if "swap_amplitude" in cfg.scenario:
        swap = {
            "amplitude": _scn(cfg, "swap_amplitude"),
            "mod_frequency": _scn(cfg, "swap_mod_frequency"),
            "duration": _scn(cfg, "swap_duration", default=160.0),
        }
    traj = emission_protocol(
        cfg.tb,
        cfg.cp,
        cfg.lm,
        mode_index=mode_index,
        omega_park=omega_park,
        swap=swap,
        omega_emit=float(omega_emit) if omega_emit is not None else None,
        scan_window=scan_window,
        ramp_duration=_scn(cfg, "ramp_duration", default=120.0),
        emit_hold=_scn(cfg, "emit_hold", default=600.0),
        prep=cfg.scenario.get("prep", "full"),
        prep_delay=_scn(cfg, "prep_delay", default=0.0),
        ideal=ideal,
        rtol=_scn(cfg, "rtol", default=1e-8),
    )
    write_csv(
        out / "emission.csv",
        ["t_ns", "P_e", "N_ph_L", "N_ph_R", "I_out_L", "I_out_R"],
        ["ns", "1", "1", "1", "1/ns", "1/ns"],
        np.column_stack(
            [
                traj.t,
                traj.P_e,
                traj.N_L,
                traj.N_R,
                np.abs(traj.a_out("L")) ** 2,
                np.abs(traj.a_out("R")) ** 2,
            ]
        ),
    )
    files = ["emission.csv"]
    window = _scn(cfg, "spectrogram_window", default=200.0)
    rec = traj.a_out("L") + traj.a_out("R")
    dt = traj.t[1] - traj.t[0]
    if len(rec) * dt > window * 1.5:
        tc, freqs, mag = spectrogram(rec, dt, window=window)
        rows = [
            (tc[i], freqs[k], mag[k, i])
            for i in range(len(tc))
            for k in range(0, len(freqs), max(1, len(freqs) // 256))
        ]
        write_csv(
            out / "emission_spectrogram.csv",
            ["t_ns", "frequency_GHz", "magnitude"],
            ["ns", "GHz", "1"],
            rows,
        )
        files.append("emission_spectrogram.csv")
    results["eta"] = traj.eta
    results["N_L_final"] = float(traj.N_L[-1])
    results["N_R_final"] = float(traj.N_R[-1])
    return files


def _run_purcell(cfg, out, workers, results):
    grid = cfg.omega_q_grid()
    basis = mode_basis(cfg.tb, cfg.cp)
    from .lattice import chain_hamiltonian

    rates = extract_mode_rates(chain_hamiltonian(cfg.tb), cfg.lm, n_sites=cfg.tb.N)
    kwargs = {}
    for key in ("c_c", "c_sigma_q", "z0", "omega_ro", "g_ro",
                "gamma_ro_ext", "gamma_ro_int"):
        if key in cfg.scenario:
            name = {"c_c": "C_c", "c_sigma_q": "C_sigma_q", "z0": "Z0",
                    "omega_ro": "omega_RO", "g_ro": "g_RO",
                    "gamma_ro_ext": "gamma_RO_ext",
                    "gamma_ro_int": "gamma_RO_int"}[key]
            kwargs[name] = _scn(cfg, key)
    budget = purcell_budget(grid, basis, rates, **kwargs)
    write_csv(
        out / "purcell.csv",
        [
            "omega_q_GHz",
            "gamma_drive_GHz",
            "gamma_readout_GHz",
            "gamma_cca_GHz",
            "gamma_total_GHz",
            "T1_us",
        ],
        ["GHz", "GHz", "GHz", "GHz", "GHz", "us"],
        np.column_stack(
            [
                budget.omega_q,
                budget.drive,
                budget.readout,
                budget.cca,
                budget.total,
                budget.t1_us(budget.total),
            ]
        ),
    )
    results["min_T1_us"] = float(np.min(budget.t1_us(budget.total)))
    return ["purcell.csv"]


def _run_ac_stark(cfg, out, workers, results):
    powers_dbm = np.linspace(
        _scn(cfg, "power_min_dbm"), _scn(cfg, "power_max_dbm"),
        _scn(cfg, "power_points", int),
    )
    omega_m = _scn(cfg, "omega_m")
    chi_m = _scn(cfg, "chi_m")
    rows = []
    for p_dbm in powers_dbm:
        p_in = 1e-3 * 10 ** (p_dbm / 10.0)
        n, wq = ac_stark_model(
            P_in=p_in,
            attenuation=_scn(cfg, "attenuation"),
            omega_m=omega_m,
            chi_m=chi_m,
            gamma_ext_port=_scn(cfg, "gamma_ext_port"),
            gamma_ext_other=_scn(cfg, "gamma_ext_other"),
            gamma_int=_scn(cfg, "gamma_int"),
            omega_q0=_scn(cfg, "omega_q0"),
        )
        rows.append((p_dbm, p_in, n, wq))
    write_csv(
        out / "ac_stark.csv",
        ["P_in_dBm", "P_in_W", "n_photons", "omega_q_GHz"],
        ["dBm", "W", "1", "GHz"],
        rows,
    )
    results["max_photons"] = float(max(r[2] for r in rows))
    return ["ac_stark.csv"]


def _run_fit_roundtrip(cfg, out, workers, results):
    seed = cfg.require_seed()
    rng = np.random.default_rng(seed)
    n_trials = _scn(cfg, "n_trials", int, default=10)
    noise = _scn(cfg, "noise", default=0.01)
    n_points = _scn(cfg, "n_points", int, default=801)
    rows = []
    for trial in range(n_trials):
        true = ReflectionTraceParams(
            omega_m=rng.uniform(4.5, 8.0),
            gamma_ext_L=rng.uniform(0.5e-3, 4e-3),
            gamma_ext_R=rng.uniform(0.5e-3, 4e-3),
            gamma_int=rng.uniform(1e-3, 3e-3),
            A_L=rng.uniform(0.8, 1.2),
            A_R=rng.uniform(0.8, 1.2),
            alpha_L=rng.uniform(-0.5, 0.5),
            alpha_R=rng.uniform(-0.5, 0.5),
            phi_L=rng.uniform(-0.3, 0.3),
            phi_R=rng.uniform(-0.3, 0.3),
        )
        g_tot = true.gamma_ext_L + true.gamma_ext_R + true.gamma_int
        omega = np.linspace(true.omega_m - 10 * g_tot, true.omega_m + 10 * g_tot,
                            n_points)
        tl = reflection_spectrum(true, omega, "L")
        tr = reflection_spectrum(true, omega, "R")
        tl += noise * (rng.normal(size=n_points) + 1j * rng.normal(size=n_points))
        tr += noise * (rng.normal(size=n_points) + 1j * rng.normal(size=n_points))
        fit = fit_reflection(omega, tl, tr)
        rows.append(
            (
                trial,
                true.omega_m, fit.omega_m,
                true.gamma_ext_L, fit.gamma_ext_L,
                true.gamma_ext_R, fit.gamma_ext_R,
                true.gamma_int, fit.gamma_int,
            )
        )
    write_csv(
        out / "fit_roundtrip.csv",
        [
            "trial",
            "omega_m_true_GHz", "omega_m_fit_GHz",
            "gamma_ext_L_true_GHz", "gamma_ext_L_fit_GHz",
            "gamma_ext_R_true_GHz", "gamma_ext_R_fit_GHz",
            "gamma_int_true_GHz", "gamma_int_fit_GHz",
        ],
        ["1"] + ["GHz"] * 8,
        rows,
    )
    arr = np.asarray(rows)
    rel = np.abs(arr[:, 2::2] - arr[:, 1::2]) / arr[:, 1::2]
    results["max_rel_error"] = float(rel.max())
    results["n_trials"] = n_trials
    return ["fit_roundtrip.csv"]


_RUNNERS = {
    "spectrum": _run_spectrum,
    "participation": _run_participation,
    "superstrong-dynamics": _run_superstrong,
    "chirality-map": _run_chirality_map,
    "dissipation-ensemble": _run_dissipation_ensemble,
    "emission": _run_emission,
    "purcell": _run_purcell,
    "ac-stark": _run_ac_stark,
    "fit-roundtrip": _run_fit_roundtrip,
}


def run_scenario(name: str, cfg: RunConfig, out_dir, workers: int = 1) -> dict:
    """Execute one named scenario, writing CSVs, manifest and summary."""
    from pathlib import Path

    if name not in _RUNNERS:
        raise ConfigError(
            f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: dict = {}
    files = _RUNNERS[name](cfg, out, workers, results)

    manifest = {
        "scenario": name,
        "seed": cfg.seed,
        "workers": workers,
        "outputs": files,
        "results": results,
        "parameters": {
            "tight_binding": dataclasses.asdict(cfg.tb),
            "coupling": dataclasses.asdict(cfg.cp),
            "loss": dataclasses.asdict(cfg.lm),
            "circuit": dataclasses.asdict(cfg.circuit) if cfg.circuit else None,
            "sweep": cfg.sweep,
            "scenario_keys": cfg.scenario,
        },
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    with open(out / "summary.txt", "w") as fh:
        fh.write(f"scenario: {name}\n")
        fh.write(f"outputs: {', '.join(files)}\n")
        for key, val in sorted(results.items()):
            fh.write(f"{key}: {val}\n")
    return manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ccaqed",
        description="Giant-atom coupled-cavity-array scenarios",
    )
    parser.add_argument("scenario", help="|".join(SCENARIOS))
    parser.add_argument("--config", required=True, help="INI run configuration")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker-pool size (default: CCAQED_WORKERS or 1)",
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )
    args = parser.parse_args(argv)

    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("CCAQED_WORKERS", "1"))
    if workers < 1:
        print("error: workers must be >= 1", file=sys.stderr)
        return 2

    try:
        cfg = load_config(args.config, args.overrides)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        manifest = run_scenario(args.scenario, cfg, args.out, workers)
    except (ConfigError, ValueError, KeyError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 3
    print(f"{args.scenario}: wrote {', '.join(manifest['outputs'])} to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
