"""Compact approximate coverage track.

Three simplifications against the exact track: the Nakagami power CDF is
replaced by a fitted exponential mixture (turning derivative sums into
alternating binomial sums), non-line-of-sight interference from and to
UAVs is neglected, and interfering UAVs transmit at their mean power
(removing one integral).
"""

from __future__ import annotations

import math

import numpy as np

from .channel import NAKAGAMI_FIT_B, Condition, LinkClass, u2u_distance_pdf
from .config import ScenarioConfig
from .curves import CoverageCurve, SharingMode
from .errors import ConfigError, DomainError
from .power import mean_uav_power
from .scenario import Scenario
from .analysis_exact import (
    InterferenceLaplacian,
    _ExclusionFunctional,
    _MixtureFunctional,
    _fixed_power_law,
    _gue_serving_law,
    _merge_edges,
    _panel_nodes,
    _ring_sums_for,
    _serving_panels,
    _thresholds_linear,
)

__all__ = ["coverage_u2u_approx", "coverage_gue_approx"]


def _fit_b(m: int) -> float:
    if m not in NAKAGAMI_FIT_B:
        raise DomainError(f"no fitted CDF constant for Nakagami m = {m}")
    return NAKAGAMI_FIT_B[m]


def _binomial_coverage(m: int, z, noise, transform):
    """Alternating binomial sum of the fitted-CDF coverage expansion.

    ``z`` has shape (..., m) holding the per-index arguments i*b*T/...;
    ``transform`` maps a flat array of arguments to transform values.
    """
    vals = transform(z.reshape(-1)).reshape(z.shape)
    out = np.zeros(z.shape[:-1])
    with np.errstate(under="ignore"):
        for i in range(1, m + 1):
            zi = z[..., i - 1]
            out += math.comb(m, i) * (-1.0) ** (i + 1) * np.exp(-noise * zi) * vals[..., i - 1]
    return out


def _mean_uav_tx_power(scn: Scenario) -> float:
    return mean_uav_power(
        scn.u2u_dist, scn.pc_u, scn.table, scn.los, scn.heights.h_u, gain=1.0
    )


def coverage_u2u_approx(
    cfg: ScenarioConfig, mode: SharingMode, thresholds_db
) -> CoverageCurve:
    """Approximate coverage of the typical UAV pair link.

    Only the line-of-sight serving branch survives, so the curve tends
    to the mean serving LoS probability (not 1) as the threshold drops.
    """
    scn = Scenario(cfg, mode)
    t_lin = _thresholds_linear(thresholds_db)
    m = scn.table.m(LinkClass.UU, Condition.LOS)
    b = _fit_b(m)

    comps = []
    two_pi = 2.0 * math.pi
    if scn.lam_u_hat > 0.0:
        comps.append(
            (two_pi * scn.lam_u_hat,
             _MixtureFunctional(
                 _ring_sums_for(scn, LinkClass.UU, Condition.LOS),
                 _fixed_power_law(_mean_uav_tx_power(scn)),
             ))
        )
    if scn.include_gue_on_uav and scn.lam_b > 0.0:
        comps.append(
            (two_pi * scn.lam_b,
             _MixtureFunctional(
                 _ring_sums_for(scn, LinkClass.GU, Condition.LOS), _gue_serving_law(scn)
             ))
        )
    lap = InterferenceLaplacian(comps, max_order=0)

    sat = [scn.uav_saturation_radius(Condition.LOS)]
    r, w = _serving_panels(scn, scn.u2u_dist.max_dist, with_bs_pattern=False, extra=sat)
    pdf = u2u_distance_pdf(r, scn.u2u_dist)
    p_l = scn.p_los(LinkClass.UU, r)
    zeta = scn.zeta(LinkClass.UU, Condition.LOS, r)
    power = scn.uav_tx_power(r, Condition.LOS)

    idx = np.arange(1, m + 1)
    z = b * np.einsum("r,t,i->rti", zeta / power, t_lin, idx)
    if comps:
        lap.prepare(z.min(), z.max(), scn.cfg.numerics.grid_points_per_decade)
    cond_cov = _binomial_coverage(m, z, scn.noise_mw, lap)
    coverage = (w * pdf * p_l) @ np.clip(cond_cov, 0.0, 1.0)
    return CoverageCurve(np.asarray(thresholds_db, dtype=float), coverage)


def coverage_gue_approx(
    cfg: ScenarioConfig, mode: SharingMode, thresholds_db
) -> CoverageCurve:
    """Approximate uplink coverage of the typical ground user. Both
    serving branches are kept; UAV interference is line-of-sight only at
    the mean UAV power, co-channel user interference stays exact."""
    scn = Scenario(cfg, mode)
    if scn.lam_b <= 0.0:
        raise ConfigError(
            "uplink coverage needs a positive station density", field="bs_density_per_km2"
        )
    t_lin = _thresholds_linear(thresholds_db)

    comps = []
    two_pi = 2.0 * math.pi
    if scn.uav_density_at_station > 0.0:
        comps.append(
            (two_pi * scn.uav_density_at_station,
             _MixtureFunctional(
                 _ring_sums_for(scn, LinkClass.UB, Condition.LOS),
                 _fixed_power_law(_mean_uav_tx_power(scn)),
             ))
        )
    law_g = _gue_serving_law(scn)
    for cond in Condition:
        comps.append(
            ((two_pi * scn.lam_b) ** 2,
             _ExclusionFunctional(_ring_sums_for(scn, LinkClass.GB, cond), law_g))
        )
    lap = InterferenceLaplacian(comps, max_order=0)

    r, w = _serving_panels(scn, 6.0 * scn.sigma_g, with_bs_pattern=True)
    pdf = 2.0 * math.pi * scn.lam_b * r * np.exp(-scn.lam_b * math.pi * r**2)
    p_l = scn.p_los(LinkClass.GB, r)

    branches = []
    z_all = []
    for cond, p_cond in ((Condition.LOS, p_l), (Condition.NLOS, 1.0 - p_l)):
        m = scn.table.m(LinkClass.GB, cond)
        b = _fit_b(m)
        zeta = scn.zeta(LinkClass.GB, cond, r)
        power = scn.gue_tx_power(r, cond)
        idx = np.arange(1, m + 1)
        z = b * np.einsum("r,t,i->rti", zeta / power, t_lin, idx)
        branches.append((m, w * pdf * p_cond, z))
        z_all.append(z.reshape(-1))
    z_all = np.concatenate(z_all)
    lap.prepare(z_all.min(), z_all.max(), scn.cfg.numerics.grid_points_per_decade)

    coverage = np.zeros_like(t_lin)
    for m, weight, z in branches:
        cond_cov = _binomial_coverage(m, z, scn.noise_mw, lap)
        coverage += weight @ np.clip(cond_cov, 0.0, 1.0)
    return CoverageCurve(np.asarray(thresholds_db, dtype=float), coverage)
