"""Scenario configuration: one validated record for every knob.

Human-facing units at this boundary (densities per km^2, powers in dBm,
angles in degrees); everything downstream works in metres, mW and
radians.
"""

from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field, fields

from .errors import ConfigError

__all__ = ["ScenarioConfig", "load_config", "config_hash"]


@dataclass
class Heights:
    h_b: float = 25.0
    h_g: float = 1.5
    h_u: float = 100.0


@dataclass
class NodePower:
    rho_dbm: float = -58.0
    epsilon: float = 0.6
    p_max_dbm: float = 24.0


@dataclass
class Antenna:
    n_elements: int = 8
    downtilt_deg: float = 102.0
    element_gain_dbi: float = 8.0
    spacing_wavelengths: float = 0.5


@dataclass
class LosParams:
    a1: float = 0.3
    a2: float = 500.0
    a3: float = 20.0


@dataclass
class NakagamiM:
    # LoS shape per link pairing; NLoS links are Rayleigh unless overridden
    gb_los: int = 3
    gu_los: int = 3
    ub_los: int = 5
    uu_los: int = 5
    gb_nlos: int = 1
    gu_nlos: int = 1
    ub_nlos: int = 1
    uu_nlos: int = 1


@dataclass
class Noise:
    psd_dbm_hz: float = -174.0
    noise_figure_db: float = 7.0
    prb_bandwidth_hz: float = 180e3


@dataclass
class Numerics:
    ring_truncation_m: float = 25_000.0
    rel_tol: float = 1e-6
    serving_points_per_panel: int = 12
    mixture_points_per_panel: int = 8
    grid_points_per_decade: int = 24
    gain_refine_max_dcos: float = 0.03


@dataclass
class Sim:
    drops: int = 100_000
    seed: int = 1
    window_radius_m: float = 25_000.0
    workers: int = 1


@dataclass
class ScenarioConfig:
    bs_density_per_km2: float = 5.0
    uav_density_per_km2: float = 1.0
    heights: Heights = field(default_factory=Heights)
    mean_u2u_dist_m: float = 100.0
    max_u2u_dist_m: float = 500.0
    carrier_ghz: float = 2.0
    bandwidth_mhz: float = 10.0
    n_prbs: int = 50
    eta_u: float = 1.0
    mode: str = "underlay"
    uav_power: NodePower = field(default_factory=NodePower)
    gue_power: NodePower = field(default_factory=NodePower)
    antenna: Antenna = field(default_factory=Antenna)
    los: LosParams = field(default_factory=LosParams)
    nakagami: NakagamiM = field(default_factory=NakagamiM)
    noise: Noise = field(default_factory=Noise)
    numerics: Numerics = field(default_factory=Numerics)
    sim: Sim = field(default_factory=Sim)

    def validate(self):
        _check(self.bs_density_per_km2 >= 0.0, "bs_density_per_km2", "must be >= 0")
        _check(self.uav_density_per_km2 >= 0.0, "uav_density_per_km2", "must be >= 0")
        _check(self.heights.h_u >= 1.0, "heights.h_u", "must be >= 1 m")
        _check(self.heights.h_b > 0.0, "heights.h_b", "must be positive")
        _check(self.heights.h_g > 0.0, "heights.h_g", "must be positive")
        _check(self.mean_u2u_dist_m > 0.0, "mean_u2u_dist_m", "must be positive")
        _check(self.max_u2u_dist_m > 0.0, "max_u2u_dist_m", "must be positive")
        _check(self.carrier_ghz > 0.0, "carrier_ghz", "must be positive")
        _check(self.bandwidth_mhz > 0.0, "bandwidth_mhz", "must be positive")
        _check(self.n_prbs >= 1, "n_prbs", "must be at least 1")
        _check(0.0 <= self.eta_u <= 1.0, "eta_u", "must lie in [0, 1]")
        _check(self.mode in ("underlay", "overlay"), "mode", "must be underlay or overlay")
        if self.mode == "overlay":
            _check(0.0 < self.eta_u < 1.0, "eta_u", "overlay needs eta_u strictly inside (0, 1)")
        for name, pwr in (("uav_power", self.uav_power), ("gue_power", self.gue_power)):
            _check(0.0 <= pwr.epsilon <= 1.0, f"{name}.epsilon", "must lie in [0, 1]")
        _check(self.antenna.n_elements >= 1, "antenna.n_elements", "must be >= 1")
        _check(
            0.0 < self.antenna.downtilt_deg < 180.0,
            "antenna.downtilt_deg",
            "must lie in (0, 180)",
        )
        for name in ("a1", "a2", "a3"):
            _check(getattr(self.los, name) > 0.0, f"los.{name}", "must be positive")
        for f in fields(self.nakagami):
            m = getattr(self.nakagami, f.name)
            _check(int(m) == m and m >= 1, f"nakagami.{f.name}", "must be a positive integer")
        _check(self.noise.prb_bandwidth_hz > 0.0, "noise.prb_bandwidth_hz", "must be positive")
        _check(self.numerics.ring_truncation_m > 0.0, "numerics.ring_truncation_m", "must be positive")
        _check(self.sim.drops >= 1, "sim.drops", "must be at least 1")
        _check(self.sim.window_radius_m > 0.0, "sim.window_radius_m", "must be positive")
        _check(self.sim.workers >= 1, "sim.workers", "must be at least 1")
        # exact alpha = 2 makes the interference kernel singular
        lg_h = math.log10(self.heights.h_u)
        for name, alpha in (
            ("ub_nlos", 4.6 - 0.7 * lg_h),
            ("gu_los", 2.225 - 0.05 * lg_h),
            ("gu_nlos", 4.32 - 0.76 * lg_h),
        ):
            _check(
                alpha > 2.0 and abs(alpha - 2.0) > 1e-9,
                "heights.h_u",
                f"height-dependent exponent {name} = {alpha:.4f} must exceed 2",
            )
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def copy(self) -> "ScenarioConfig":
        return copy.deepcopy(self)

    def with_value(self, path: str, value) -> "ScenarioConfig":
        """Return a copy with the dotted ``path`` replaced by ``value``."""
        out = self.copy()
        parts = path.split(".")
        target = out
        for part in parts[:-1]:
            if not hasattr(target, part):
                raise ConfigError("unknown parameter", field=path)
            target = getattr(target, part)
        leaf = parts[-1]
        if not dataclasses.is_dataclass(target) or not hasattr(target, leaf):
            raise ConfigError("unknown parameter", field=path)
        current = getattr(target, leaf)
        if dataclasses.is_dataclass(current):
            raise ConfigError("parameter is a group, not a value", field=path)
        setattr(target, leaf, type(current)(value) if not isinstance(value, str) else value)
        out.validate()
        return out

    def get_value(self, path: str):
        target = self
        for part in path.split("."):
            if not hasattr(target, part):
                raise ConfigError("unknown parameter", field=path)
            target = getattr(target, part)
        return target


def _check(ok: bool, field_path: str, message: str):
    if not ok:
        raise ConfigError(message, field=field_path)


def _from_dict(cls, data: dict, prefix: str = ""):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", field=prefix.rstrip(".") or "<root>")
    known = {f.name: f for f in fields(cls)}
    unknown = set(data) - set(known)
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError("unknown key", field=f"{prefix}{name}")
    kwargs = {}
    for name in known:
        if name not in data:
            continue
        value = data[name]
        if name in _NESTED:
            kwargs[name] = _from_dict(_NESTED[name], value, prefix=f"{prefix}{name}.")
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc), field=prefix.rstrip(".") or "<root>") from exc


_NESTED = {
    "heights": Heights,
    "uav_power": NodePower,
    "gue_power": NodePower,
    "antenna": Antenna,
    "los": LosParams,
    "nakagami": NakagamiM,
    "noise": Noise,
    "numerics": Numerics,
    "sim": Sim,
}


def load_config(path_or_dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a JSON file path or a dict.

    Missing keys fall back to the urban defaults; unknown keys are
    rejected with the offending field path.
    """
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        try:
            with open(path_or_dict, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from exc
    cfg = _from_dict(ScenarioConfig, data)
    cfg.validate()
    return cfg


def config_hash(cfg: ScenarioConfig) -> str:
    """Stable hash of the full configuration (for output provenance)."""
    blob = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
