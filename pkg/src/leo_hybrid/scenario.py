"""Experiment scenarios: a flat ``key = value`` file format and its defaults.

dB, dBW and dBm values are converted here; everything downstream works
in linear SI units. Lists are comma separated. Lines starting with ``#``
or ``;`` are comments. Built-in scenarios ship as ``*.cfg`` files inside
the package and can be referred to by their stem.
"""

import configparser
import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Tuple

import numpy as np

from .channel import ArrayGeometry, channel_power, noise_power
from .npa import NpaModel
from .power import Architecture, ArchitectureSpec, ComponentPowers

__all__ = [
    "SWEEP_KINDS",
    "Scenario",
    "ScenarioError",
    "parse_scenario",
    "load_scenario",
    "builtin_scenarios",
    "db_to_linear",
]

SWEEP_KINDS = ("none", "power_budget_dbw", "hi_res_ratio", "rf_chains", "rician_factor_db")


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario file."""


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class Scenario:
    """One experiment: a system setup plus the parameter swept over.

    Every field name is also the key used in scenario files. Component
    powers are in mW, angles in radians.
    """

    name: str = "custom"
    nx: int = 8
    ny: int = 8
    users: int = 4
    rician_factor_db: float = 18.0
    carrier_hz: float = 11.45e9
    altitude_m: float = 1e6
    bandwidth_hz: float = 0.25e9
    noise_temp_k: float = 300.0
    sat_gain_dbi: float = 0.0
    ut_gain_dbi: float = 0.0
    beta1_mag: float = 2.96
    beta1_phase: float = 0.0
    beta3_mag: float = 0.1418
    beta3_phase: float = -2.816
    pmax_dbm: float = 6.0
    xi_max: float = 0.3
    architectures: Tuple[str, ...] = ("fully_trps",)
    rf_chains: int = 4
    hi_res_ratio: float = 0.5
    r_high: int = 4
    r_low: int = 2
    power_budget_dbw: float = 22.0
    sweep: str = "power_budget_dbw"
    sweep_values: Tuple[float, ...] = (10.0, 14.0, 18.0, 22.0, 26.0, 30.0)
    p_lps_mw: float = 10.0
    p_hps_mw: float = 20.0
    p_rfc_mw: float = 338.0
    p_lo_mw: float = 5.0
    p_bb_mw: float = 200.0
    p_sw_mw: float = 1.0
    seed: int = 0
    drops: int = 1
    mc_samples: int = 10000
    linear_baseline: bool = False
    mc_validate: bool = False
    inner_iters: int = 20
    max_outer_iters: int = 10
    mm_max_iter: int = 200
    mm_rounds: int = 50

    def __post_init__(self):
        positive = ("nx", "ny", "users", "carrier_hz", "altitude_m", "bandwidth_hz",
                    "xi_max", "rf_chains", "drops", "mc_samples", "inner_iters",
                    "max_outer_iters", "mm_max_iter", "mm_rounds", "r_high", "r_low")
        for key in positive:
            if not getattr(self, key) > 0:
                raise ScenarioError(f"{key} must be positive, got {getattr(self, key)}")
        for key in ("noise_temp_k", "p_lps_mw", "p_hps_mw", "p_rfc_mw", "p_lo_mw",
                    "p_bb_mw", "p_sw_mw"):
            if getattr(self, key) < 0:
                raise ScenarioError(f"{key} must be nonnegative, got {getattr(self, key)}")
        if not 0.0 <= self.hi_res_ratio <= 1.0:
            raise ScenarioError(f"hi_res_ratio must lie in [0, 1], got {self.hi_res_ratio}")
        if self.xi_max > 1:
            raise ScenarioError(f"xi_max must lie in (0, 1], got {self.xi_max}")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.sweep not in SWEEP_KINDS:
            raise ScenarioError(f"sweep must be one of {SWEEP_KINDS}, got {self.sweep!r}")
        if self.sweep != "none" and not self.sweep_values:
            raise ScenarioError("sweep_values is empty")
        if self.sweep == "hi_res_ratio" and any(not 0 <= v <= 1 for v in self.sweep_values):
            raise ScenarioError("hi_res_ratio sweep values must lie in [0, 1]")
        if self.sweep == "rf_chains" and any(v != int(v) or v < 1 for v in self.sweep_values):
            raise ScenarioError("rf_chains sweep values must be positive integers")
        if not self.architectures:
            raise ScenarioError("architectures is empty")
        for a in self.architectures:
            try:
                Architecture(a)
            except ValueError:
                choices = ", ".join(k.value for k in Architecture)
                raise ScenarioError(f"unknown architecture {a!r}; choose from {choices}") from None

    # Derived model objects.

    @property
    def geometry(self):
        return ArrayGeometry(self.nx, self.ny)

    @property
    def nt(self):
        return self.nx * self.ny

    @property
    def channel_gain(self):
        return channel_power(float(db_to_linear(self.sat_gain_dbi)),
                             float(db_to_linear(self.ut_gain_dbi)),
                             self.nt, self.carrier_hz, self.altitude_m)

    @property
    def noise(self):
        return noise_power(self.bandwidth_hz, self.noise_temp_k)

    @property
    def npa(self):
        return NpaModel.from_polar(self.beta1_mag, self.beta1_phase, self.beta3_mag,
                                   self.beta3_phase, self.pmax_dbm, self.xi_max)

    @property
    def components(self):
        return ComponentPowers(self.p_lps_mw * 1e-3, self.p_hps_mw * 1e-3, self.p_rfc_mw * 1e-3,
                               self.p_lo_mw * 1e-3, self.p_bb_mw * 1e-3, self.p_sw_mw * 1e-3)

    def point(self, value):
        """Copy of this scenario with the swept parameter set to ``value``."""
        if self.sweep == "none":
            return self
        if self.sweep == "rf_chains":
            value = int(value)
        return dataclasses.replace(self, **{self.sweep: value})

    def architecture_spec(self, kind):
        return ArchitectureSpec.build(kind, self.nt, self.rf_chains, self.hi_res_ratio)

    @property
    def power_budget_w(self):
        return float(db_to_linear(self.power_budget_dbw))

    @property
    def rician_factor(self):
        return float(db_to_linear(self.rician_factor_db))

    def paper_scale(self):
        """The full-size array: 12 x 12 antennas, 9 users and 9 RF chains."""
        return dataclasses.replace(self, nx=12, ny=12, users=9, rf_chains=9)


_FIELDS = {f.name: f for f in dataclasses.fields(Scenario)}
_SECTION = "scenario"


def _convert(name, raw):
    f = _FIELDS[name]
    default = f.default
    try:
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = [s.strip() for s in raw.split(",") if s.strip()]
            if default and isinstance(default[0], str):
                return tuple(items)
            return tuple(float(s) for s in items)
        return raw.strip()
    except ValueError:
        raise ScenarioError(f"cannot parse {name} = {raw!r}") from None


def parse_scenario(text, name="custom"):
    """Parse scenario file contents.

    Raises
    ------
    ScenarioError
        Unknown key, duplicate key, unparsable value or invalid setup.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from None
    values = {"name": name}
    for key, raw in parser.items(_SECTION):
        if key not in _FIELDS:
            raise ScenarioError(f"unknown scenario key {key!r}")
        values[key] = _convert(key, raw)
    return Scenario(**values)


def builtin_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files(__package__) / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def load_scenario(ref):
    """Load a scenario from a path, or a built-in one by name."""
    path = Path(ref)
    if path.is_file():
        return parse_scenario(path.read_text(encoding="utf-8"), name=path.stem)
    if ref in builtin_scenarios():
        res = resources.files(__package__) / "scenarios" / f"{ref}.cfg"
        return parse_scenario(res.read_text(encoding="utf-8"), name=ref)
    raise ScenarioError(
        f"no scenario file {ref!r}; built-in scenarios: {', '.join(builtin_scenarios())}"
    )
