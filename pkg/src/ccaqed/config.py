"""INI run configuration: device, coupling, losses, sweep and scenario keys.

A run is described by a flat, sectioned key-value file.  The [device]
section carries either lumped-element values (converted to a hopping model)
or the hopping model directly — never both.  Scenario-specific keys live in
[scenario] and are parsed by the scenario that consumes them.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

from .circuit import derive_tight_binding
from .params import CircuitParams, CouplingProfile, LossModel, TightBindingParams

__all__ = ["ConfigError", "RunConfig", "load_config"]

FF = 1e-15
NH = 1e-9

_CIRCUIT_KEYS = ("l_g_nh", "c_g_ff", "c_1_ff", "c_2_ff", "c_p1_ff", "c_p2_ff", "c_p3_ff")
_TB_KEYS = ("omega_r", "z_r", "j")


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration."""

    tb: TightBindingParams
    cp: CouplingProfile
    lm: LossModel
    circuit: CircuitParams | None
    sweep: dict = field(default_factory=dict)
    scenario: dict = field(default_factory=dict)
    seed: int | None = None

    def omega_q_grid(self):
        import numpy as np

        try:
            lo = self.sweep["omega_q_min"]
            hi = self.sweep["omega_q_max"]
            n = int(self.sweep["omega_q_points"])
        except KeyError as e:
            raise ConfigError(f"sweep section missing key {e.args[0]!r}") from None
        if not (hi > lo and n >= 2):
            raise ConfigError("sweep grid needs omega_q_max > omega_q_min and >= 2 points")
        return np.linspace(lo, hi, n)

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("stochastic run needs a seed ([sweep] seed or --seed)")
        return self.seed


def _floats(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def _get(section, key, conv=float, default=None):
    if key not in section:
        if default is not None:
            return default
        raise ConfigError(f"[{section.name}] missing key {key!r}")
    try:
        return conv(section[key])
    except ValueError as e:
        raise ConfigError(f"[{section.name}] bad value for {key!r}: {e}") from None


def _parse_device(sec) -> tuple[TightBindingParams, CircuitParams | None]:
    keys = {k.lower() for k in sec}
    has_circuit = any(k in keys for k in _CIRCUIT_KEYS)
    has_tb = any(k in keys for k in _TB_KEYS)
    if has_circuit and has_tb:
        raise ConfigError("[device] mixes lumped-element and hopping-model keys")
    if not has_circuit and not has_tb:
        raise ConfigError("[device] needs lumped-element or hopping-model keys")
    n = _get(sec, "n", int)
    if has_circuit:
        circuit = CircuitParams(
            L_g=_get(sec, "l_g_nh") * NH,
            C_g=_get(sec, "c_g_ff") * FF,
            C_1=_get(sec, "c_1_ff") * FF,
            C_2=_get(sec, "c_2_ff") * FF,
            C_p1=_get(sec, "c_p1_ff") * FF,
            C_p2=_get(sec, "c_p2_ff") * FF,
            C_p3=_get(sec, "c_p3_ff", default=0.0) * FF,
            N=n,
        )
        return derive_tight_binding(circuit), circuit
    tb = TightBindingParams(
        omega_r=_get(sec, "omega_r"),
        Z_r=_get(sec, "z_r"),
        J=_get(sec, "j", _floats),
        N=n,
    )
    return tb, None


def load_config(path, overrides: list[str] | None = None) -> RunConfig:
    """Parse a run configuration file, applying ``section.key=value`` overrides."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}") from None
    except configparser.Error as e:
        raise ConfigError(f"malformed config file: {e}") from None

    for item in overrides or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser[section][key] = value

    for name in ("device", "coupling", "loss"):
        if not parser.has_section(name):
            raise ConfigError(f"config missing required section [{name}]")

    tb, circuit = _parse_device(parser["device"])

    sec = parser["coupling"]
    try:
        cp = CouplingProfile(
            first_site=_get(sec, "first_site", int),
            g=_get(sec, "g", _floats),
        )
    except ValueError as e:
        raise ConfigError(f"[coupling] {e}") from None

    sec = parser["loss"]
    try:
        lm = LossModel(
            kappa_int=_get(sec, "kappa_int", default=0.0),
            kappa_q=_get(sec, "kappa_q", default=0.0),
            kappa_ext_L=_get(sec, "kappa_ext_l", default=0.0),
            kappa_ext_R=_get(sec, "kappa_ext_r", default=0.0),
            kappa_ext_Lp=_get(sec, "kappa_ext_lp", default=0.0),
            kappa_ext_Rp=_get(sec, "kappa_ext_rp", default=0.0),
        )
    except ValueError as e:
        raise ConfigError(f"[loss] {e}") from None

    sweep = {}
    if parser.has_section("sweep"):
        for key, raw in parser["sweep"].items():
            if key == "seed":
                continue
            try:
                sweep[key] = float(raw)
            except ValueError:
                raise ConfigError(f"[sweep] bad value for {key!r}: {raw!r}") from None
    seed = None
    if parser.has_option("sweep", "seed"):
        seed = _get(parser["sweep"], "seed", int)

    scenario = dict(parser["scenario"]) if parser.has_section("scenario") else {}
    return RunConfig(
        tb=tb, cp=cp, lm=lm, circuit=circuit,
        sweep=sweep, scenario=scenario, seed=seed,
    )
