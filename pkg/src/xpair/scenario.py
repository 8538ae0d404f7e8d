"""Scenario files: INI-style documents with explicit unit suffixes.

A scenario collects everything one run needs in sections [beam],
[target], [detectors], [grid], [sampler]. Every dimensioned value
carries a unit suffix ("100 keV", "3e-2 sr"); unknown keys and missing
units are rejected with the full key path in the message.
"""

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import ScenarioError
from .kinematics import ElectronState, ScatterConfig
from .quadrature import GridSpec
from .rates import BeamParams, DetectorConfig, TargetConfig
from .sampler import SamplerConfig
from .units import kev_to_natural

# suffix -> factor into the canonical unit of each kind
_UNIT_TABLES = {
    "energy_kev": {"keV": 1.0, "eV": 1e-3, "MeV": 1e3},
    "angle_rad": {"rad": 1.0, "mrad": 1e-3},
    "solid_angle_sr": {"sr": 1.0},
    "time_fs": {"fs": 1.0, "ps": 1e3},
    "intensity_w_cm2": {"W/cm2": 1.0},
    "length_m": {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "m": 1.0},
    "per_s": {"1/s": 1.0},
    "per_barn": {"1/b": 1.0, "1/barn": 1.0},
}
_DIMENSIONLESS = ("float", "int")

_SCHEMA = {
    "beam": {
        "omega": "energy_kev",
        "omega_L": "energy_kev",
        "gamma": "float",
        "alpha": "angle_rad",
        "I_L": "intensity_w_cm2",
        "tau_L": "time_fs",
        "N_e": "float",
        "N_gamma": "float",
        "sigma_te": "length_m",
        "sigma_tgamma": "length_m",
        "sigma_le": "length_m",
    },
    "target": {
        "material": "str",
        "thickness": "length_m",
        "flux": "per_s",
        "areal_density": "per_barn",
    },
    "detectors": {
        "theta1": "angle_rad",
        "phi1": "angle_rad",
        "theta2": "angle_rad",
        "phi2": "angle_rad",
        "solid_angle1": "solid_angle_sr",
        "solid_angle2": "solid_angle_sr",
        "bandwidth": "float",
        "center_energy": "energy_kev",
    },
    "grid": {
        "quantity": "str",
        "mode": "str",
        "omega1_min": "energy_kev",
        "omega1_max": "energy_kev",
        "omega1_steps": "int",
        "theta_min": "angle_rad",
        "theta_max": "angle_rad",
        "theta_steps": "int",
        "phi1": "angle_rad",
        "phi2": "angle_rad",
        "ir_cutoff": "energy_kev",
        "rel_tol": "float",
    },
    "sampler": {
        "n_events": "int",
        "seed": "int",
        "ir_cutoff": "energy_kev",
        "envelope_resolution": "str",
        "safety": "float",
        "cos_theta1_min": "float",
        "cos_theta1_max": "float",
        "cos_theta2_min": "float",
        "cos_theta2_max": "float",
    },
}

GRID_QUANTITIES = ("triple_xsec", "pair_yield", "photon2_integrated",
                   "single_compton")


def _parse_value(path: str, raw: str, kind: str):
    if kind == "str":
        return raw.strip()
    parts = raw.split()
    if kind in _DIMENSIONLESS:
        if len(parts) != 1:
            raise ScenarioError(f"{path}: dimensionless value must carry no "
                                f"unit suffix, got {raw!r}")
        try:
            return int(parts[0]) if kind == "int" else float(parts[0])
        except ValueError:
            raise ScenarioError(f"{path}: cannot parse {raw!r}") from None
    if len(parts) != 2:
        raise ScenarioError(f"{path}: expected '<value> <unit>', got {raw!r}")
    table = _UNIT_TABLES[kind]
    num, unit = parts
    if unit not in table:
        raise ScenarioError(f"{path}: unit {unit!r} not valid here "
                            f"(expected one of {sorted(table)})")
    try:
        return float(num) * table[unit]
    except ValueError:
        raise ScenarioError(f"{path}: cannot parse {raw!r}") from None


@dataclass
class Scenario:
    """Parsed scenario: raw string tree plus typed values."""

    raw: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    name: str = ""

    def has(self, section: str, key: str | None = None) -> bool:
        if section not in self.values:
            return False
        return key is None or key in self.values[section]

    def get(self, section: str, key: str, default=None):
        if not self.has(section, key):
            return default
        return self.values[section][key]

    def require(self, section: str, *keys: str):
        if section not in self.values:
            raise ScenarioError(f"{section}: missing required section")
        missing = [k for k in keys if k not in self.values[section]]
        if missing:
            raise ScenarioError(", ".join(
                f"{section}.{k}: missing required key" for k in missing))

    # -- domain-object builders ------------------------------------------

    def incident_energy_kev(self) -> float:
        self.require("beam")
        has_w = self.has("beam", "omega")
        has_wl = self.has("beam", "omega_L")
        if has_w == has_wl:
            raise ScenarioError("beam.omega: exactly one of beam.omega or "
                                "beam.omega_L must be set")
        return self.get("beam", "omega") if has_w else self.get("beam", "omega_L")

    def electron(self) -> ElectronState:
        return ElectronState(self.get("beam", "gamma", 1.0))

    def scatter_base(self) -> ScatterConfig:
        """ScatterConfig with placeholder detector angles (set per use)."""
        self.require("beam", "alpha")
        return ScatterConfig(kev_to_natural(self.incident_energy_kev()),
                             self.get("beam", "alpha"),
                             0.0, 0.0, 0.0, 0.0, self.electron())

    def beam_params(self) -> BeamParams:
        self.require("beam", "omega_L", "I_L", "tau_L")
        return BeamParams(
            N_e=self.get("beam", "N_e", 1e10),
            N_gamma=self.get("beam", "N_gamma", 0.0),
            sigma_te_m=self.get("beam", "sigma_te", 35e-6),
            sigma_tgamma_m=self.get("beam", "sigma_tgamma", 35e-6),
            sigma_le_m=self.get("beam", "sigma_le", 0.0),
            omega_L_ev=self.get("beam", "omega_L") * 1e3,
            I_L_w_cm2=self.get("beam", "I_L"),
            tau_L_fs=self.get("beam", "tau_L"),
            gamma=self.get("beam", "gamma", 1.0))

    def target(self) -> TargetConfig:
        self.require("target", "flux")
        flux = self.get("target", "flux")
        if self.has("target", "areal_density"):
            return TargetConfig(self.get("target", "areal_density"), flux,
                                self.get("target", "thickness", 0.0),
                                self.get("target", "material", ""))
        self.require("target", "material", "thickness")
        material = self.get("target", "material")
        if material != "Al":
            raise ScenarioError("target.material: only 'Al' has a built-in "
                                "density; give target.areal_density instead")
        return TargetConfig.aluminum(self.get("target", "thickness") * 1e6,
                                     flux)

    def detectors(self, center_energy_kev: float | None = None):
        self.require("detectors", "theta1", "phi1", "theta2", "phi2",
                     "solid_angle1", "solid_angle2", "bandwidth")
        center = center_energy_kev
        if center is None:
            if not self.has("detectors", "center_energy"):
                raise ScenarioError("detectors.center_energy: missing "
                                    "required key")
            center = self.get("detectors", "center_energy")
        bw = self.get("detectors", "bandwidth")
        det1 = DetectorConfig(self.get("detectors", "solid_angle1"), center,
                              bw, self.get("detectors", "theta1"),
                              self.get("detectors", "phi1"))
        det2 = DetectorConfig(self.get("detectors", "solid_angle2"), center,
                              bw, self.get("detectors", "theta2"),
                              self.get("detectors", "phi2"))
        return det1, det2

    def grid_spec(self) -> GridSpec:
        self.require("grid", "omega1_min", "omega1_max", "omega1_steps",
                     "theta_min", "theta_max", "theta_steps")
        mode = self.get("grid", "mode", "one")
        if mode not in ("one", "two", "custom"):
            raise ScenarioError(f"grid.mode: unknown mode {mode!r}")
        quantity = self.get("grid", "quantity", "triple_xsec")
        if quantity not in GRID_QUANTITIES:
            raise ScenarioError(f"grid.quantity: unknown quantity "
                                f"{quantity!r} (expected one of "
                                f"{GRID_QUANTITIES})")
        return GridSpec(
            self.get("grid", "omega1_min"), self.get("grid", "omega1_max"),
            self.get("grid", "omega1_steps"),
            self.get("grid", "theta_min"), self.get("grid", "theta_max"),
            self.get("grid", "theta_steps"), mode,
            self.get("grid", "phi1", 0.0),
            self.get("grid", "phi2", math.pi),
            self.get("grid", "ir_cutoff", 0.1))

    def sampler_config(self, n_events=None, seed=None) -> SamplerConfig:
        self.require("sampler", "n_events")
        res_raw = self.get("sampler", "envelope_resolution", "32")
        try:
            res = tuple(int(p) for p in res_raw.split(","))
            res = res * 5 if len(res) == 1 else res
        except ValueError:
            raise ScenarioError("sampler.envelope_resolution: expected an "
                                "integer or 5 comma-separated integers") from None
        return SamplerConfig(
            scenario=self.scatter_base(),
            n_events=int(n_events if n_events is not None
                         else self.get("sampler", "n_events")),
            seed=int(seed if seed is not None
                     else self.get("sampler", "seed", 0)),
            ir_cutoff_kev=self.get("sampler", "ir_cutoff", 0.1),
            envelope_resolution=res,
            safety=self.get("sampler", "safety", 1.2),
            cos_theta1_range=(self.get("sampler", "cos_theta1_min", -1.0),
                              self.get("sampler", "cos_theta1_max", 1.0)),
            cos_theta2_range=(self.get("sampler", "cos_theta2_min", -1.0),
                              self.get("sampler", "cos_theta2_max", 1.0)))


def parse_scenario(text: str, name: str = "") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"scenario syntax error: {exc}") from None
    raw, values = {}, {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ScenarioError(f"{section}: unknown section")
        raw[section] = {}
        values[section] = {}
        for key, val in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ScenarioError(f"{section}.{key}: unknown key")
            raw[section][key] = val
            values[section][key] = _parse_value(f"{section}.{key}", val,
                                                _SCHEMA[section][key])
    return Scenario(raw, values, name)


def serialize_scenario(scn: Scenario) -> str:
    lines = []
    for section, entries in scn.raw.items():
        lines.append(f"[{section}]")
        for key, val in entries.items():
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


def list_presets():
    base = resources.files("xpair").joinpath("presets")
    return sorted(p.name[:-4] for p in base.iterdir() if p.name.endswith(".ini"))


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario file, or a bundled preset by bare name."""
    import os

    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            return parse_scenario(fh.read(), os.path.basename(path_or_name))
    preset = resources.files("xpair").joinpath("presets",
                                               f"{path_or_name}.ini")
    if preset.is_file():
        return parse_scenario(preset.read_text(encoding="utf-8"),
                              path_or_name)
    raise ScenarioError(f"scenario {path_or_name!r}: no such file or preset "
                        f"(presets: {', '.join(list_presets())})")
