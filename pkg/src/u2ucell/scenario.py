"""Derived per-scenario tables shared by the analytical and simulation tracks.

A Scenario freezes everything the evaluators need in SI/linear units:
propagation table at the configured UAV height, LoS ring tables per link
pairing, power-control laws with the mode-dependent per-block caps, noise
power, and the base-station pattern helpers.
"""

from __future__ import annotations

import math

import numpy as np

from .channel import (
    AntennaConfig,
    Condition,
    LinkClass,
    LosModelParams,
    PropagationTable,
    RingPartition,
    U2UDistanceDist,
    bs_array_gain,
    los_probability_profile,
    ring_partition,
    urban_propagation_table,
)
from .config import ScenarioConfig
from .curves import SharingMode
from .errors import ConfigError
from .power import PowerControlParams, tx_power_per_prb

__all__ = ["Scenario", "LosTable"]

# floor applied to antenna gains inside large-scale fading ratios so that
# exact pattern nulls do not produce infinities
_GAIN_FLOOR = 1e-15


class LosTable:
    """Piecewise-constant LoS probability lookup for one height pair."""

    def __init__(self, los: LosModelParams, h_a: float, h_b: float, max_radius: float):
        part = ring_partition(los, max_radius)
        self.breakpoints = part.breakpoints
        self.values = los_probability_profile(part.midpoints, h_a, h_b, los)
        self.max_radius = max_radius

    def __call__(self, r):
        rr = np.asarray(r, dtype=float)
        idx = np.searchsorted(self.breakpoints, rr, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        out = self.values[idx]
        return float(out) if np.ndim(r) == 0 else out


_HEIGHT_KEYS = {
    LinkClass.GB: ("h_g", "h_b"),
    LinkClass.UB: ("h_u", "h_b"),
    LinkClass.GU: ("h_g", "h_u"),
    LinkClass.UU: ("h_u", "h_u"),
}


class Scenario:
    def __init__(self, cfg: ScenarioConfig, mode: SharingMode | None = None):
        cfg.validate()
        self.cfg = cfg
        self.mode = mode if mode is not None else SharingMode(cfg.mode, cfg.eta_u)

        self.lam_b = cfg.bs_density_per_km2 * 1e-6
        self.lam_u = cfg.uav_density_per_km2 * 1e-6
        self.lam_u_hat = self.mode.interfering_uav_density(self.lam_u)
        self.include_gue_on_uav = self.mode.is_underlay

        self.heights = cfg.heights
        self.los = LosModelParams(cfg.los.a1, cfg.los.a2, cfg.los.a3)
        self.antenna = AntennaConfig(
            n_elements=cfg.antenna.n_elements,
            downtilt_rad=math.radians(cfg.antenna.downtilt_deg),
            element_max_gain=10.0 ** (cfg.antenna.element_gain_dbi / 10.0),
            spacing_wavelengths=cfg.antenna.spacing_wavelengths,
        )
        self.table = urban_propagation_table(
            cfg.carrier_ghz, cfg.heights.h_u, self._nakagami_table(cfg)
        )
        self.u2u_dist = U2UDistanceDist(cfg.mean_u2u_dist_m, cfg.max_u2u_dist_m)
        self.sigma_g = 1.0 / math.sqrt(2.0 * math.pi * self.lam_b) if self.lam_b > 0 else math.inf

        n = cfg.n_prbs
        eta = self.mode.eta_u
        n_u = eta * n
        n_g = n if self.mode.is_underlay else (1.0 - eta) * n
        if n_u < 1.0 and (self.lam_u > 0.0):
            raise ConfigError(
                "UAV allocation eta_u * n_prbs must reach one resource block", field="eta_u"
            )
        self.pc_u = PowerControlParams.from_dbm(
            cfg.uav_power.rho_dbm, cfg.uav_power.epsilon, cfg.uav_power.p_max_dbm,
            n_prbs_used=max(n_u, 1.0),
        )
        self.pc_g = PowerControlParams.from_dbm(
            cfg.gue_power.rho_dbm, cfg.gue_power.epsilon, cfg.gue_power.p_max_dbm,
            n_prbs_used=max(n_g, 1.0),
        )

        bt = cfg.bandwidth_mhz * 1e6
        self.bandwidth_uav_hz = eta * bt
        self.bandwidth_gue_hz = bt if self.mode.is_underlay else (1.0 - eta) * bt

        self.noise_mw = 10.0 ** (
            (cfg.noise.psd_dbm_hz + 10.0 * math.log10(cfg.noise.prb_bandwidth_hz)
             + cfg.noise.noise_figure_db) / 10.0
        )

        self._los_tables: dict[LinkClass, LosTable] = {}
        self._los_table_radius = max(
            cfg.numerics.ring_truncation_m,
            cfg.sim.window_radius_m + 10.0 * self.sigma_g if math.isfinite(self.sigma_g) else cfg.numerics.ring_truncation_m,
            cfg.max_u2u_dist_m,
        ) + 1.0

    @staticmethod
    def _nakagami_table(cfg: ScenarioConfig):
        nk = cfg.nakagami
        return {
            (LinkClass.GB, Condition.LOS): nk.gb_los,
            (LinkClass.GB, Condition.NLOS): nk.gb_nlos,
            (LinkClass.GU, Condition.LOS): nk.gu_los,
            (LinkClass.GU, Condition.NLOS): nk.gu_nlos,
            (LinkClass.UB, Condition.LOS): nk.ub_los,
            (LinkClass.UB, Condition.NLOS): nk.ub_nlos,
            (LinkClass.UU, Condition.LOS): nk.uu_los,
            (LinkClass.UU, Condition.NLOS): nk.uu_nlos,
        }

    @property
    def uav_density_at_station(self) -> float:
        """Co-channel UAV density seen by the uplink; zero in overlay."""
        return self.lam_u_hat if self.mode.is_underlay else 0.0

    # -- geometry -----------------------------------------------------------

    def height_pair(self, cls: LinkClass) -> tuple[float, float]:
        ka, kb = _HEIGHT_KEYS[cls]
        return getattr(self.heights, ka), getattr(self.heights, kb)

    def height_diff(self, cls: LinkClass) -> float:
        h_a, h_b = self.height_pair(cls)
        return abs(h_a - h_b)

    def los_table(self, cls: LinkClass) -> LosTable:
        if cls not in self._los_tables:
            h_a, h_b = self.height_pair(cls)
            self._los_tables[cls] = LosTable(self.los, h_a, h_b, self._los_table_radius)
        return self._los_tables[cls]

    def p_los(self, cls: LinkClass, r):
        return self.los_table(cls)(r)

    def rings(self, truncation_radius: float | None = None) -> RingPartition:
        radius = truncation_radius or self.cfg.numerics.ring_truncation_m
        return ring_partition(self.los, radius)

    # -- base-station pattern ------------------------------------------------

    def bs_cos_zenith(self, node_height: float, r):
        dh = node_height - self.heights.h_b
        rr = np.asarray(r, dtype=float)
        return dh / np.sqrt(rr**2 + dh**2)

    def bs_gain_from_cos(self, cos_z):
        """Array pattern straight from the direction cosine (no arccos)."""
        cos_z = np.asarray(cos_z, dtype=float)
        n = self.antenna.n_elements
        x = 0.5 * math.pi * (cos_z - math.cos(self.antenna.downtilt_rad))
        sin_x = np.sin(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            af = np.sin(n * x) ** 2 / (n * sin_x**2)
        af = np.where(np.abs(sin_x) < 1e-9, float(n), af)
        return self.antenna.element_max_gain * (1.0 - cos_z**2) * af

    def bs_gain(self, node_height: float, r):
        cosz = self.bs_cos_zenith(node_height, r)
        theta = np.arccos(np.clip(cosz, -1.0, 1.0))
        return bs_array_gain(theta, self.antenna)

    def bs_null_radii(self, node_height: float) -> list[float]:
        """Horizontal distances of array-factor nulls and of boresight.

        Used to split quadrature panels where the pattern varies sharply.
        """
        dh = node_height - self.heights.h_b
        if dh == 0.0:
            return []
        cos_t = math.cos(self.antenna.downtilt_rad)
        n = self.antenna.n_elements
        radii = []
        targets = [cos_t]
        for k in range(1, 2 * n):
            targets.extend([cos_t + k / n, cos_t - k / n])
        for c in targets:
            # reachable cos zenith has the sign of dh and |c| < 1
            if c == 0.0 or (c > 0) != (dh > 0) or abs(c) >= 1.0:
                continue
            r = abs(dh) * math.sqrt(1.0 / c**2 - 1.0)
            radii.append(r)
        return sorted(set(radii))

    # -- large-scale fading and power ---------------------------------------

    def zeta(self, cls: LinkClass, cond: Condition, r):
        """Serving-link large-scale fading (path loss over antenna gain)."""
        rr = np.asarray(r, dtype=float)
        dh = self.height_diff(cls)
        d = np.sqrt(rr**2 + dh**2)
        tau = self.table.ref_linear(cls, cond) * d ** self.table.alpha(cls, cond)
        if cls in (LinkClass.GB, LinkClass.UB):
            h_node = self.heights.h_g if cls is LinkClass.GB else self.heights.h_u
            gain = np.maximum(self.bs_gain(h_node, rr), _GAIN_FLOOR)
            return tau / gain
        return tau

    def uav_tx_power(self, r, cond: Condition):
        """Per-block UAV power given its pair distance and link condition."""
        return tx_power_per_prb(self.zeta(LinkClass.UU, cond, r), self.pc_u)

    def gue_tx_power(self, r, cond: Condition):
        """Per-block ground-user power given its serving distance/condition."""
        return tx_power_per_prb(self.zeta(LinkClass.GB, cond, r), self.pc_g)

    def uav_saturation_radius(self, cond: Condition) -> float:
        if self.pc_u.epsilon == 0.0:
            return math.inf
        from .power import saturation_distance

        return saturation_distance(cond, self.pc_u, self.table, gain=1.0)
