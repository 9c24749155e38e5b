"""Fractional power control and the closed-form mean UAV transmit power."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    Condition,
    LinkClass,
    LosModelParams,
    PropagationTable,
    U2UDistanceDist,
    los_probability_profile,
    ring_partition,
)
from .errors import DomainError
from .specfun import lower_incomplete_gamma

__all__ = [
    "PowerControlParams",
    "tx_power_per_prb",
    "saturation_distance",
    "mean_uav_power",
]


@dataclass(frozen=True)
class PowerControlParams:
    """Fractional power control settings of one node class.

    The per-resource-block cap is the total budget divided by the number
    of resource blocks the node actually transmits on.
    """

    rho_mw: float
    epsilon: float
    p_max_total_mw: float
    n_prbs_used: float = 1.0

    def __post_init__(self):
        if self.rho_mw <= 0.0:
            raise DomainError("rho must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise DomainError("epsilon must lie in [0, 1]")
        if self.p_max_total_mw <= 0.0:
            raise DomainError("maximum power must be positive")
        if self.n_prbs_used < 1.0:
            raise DomainError("a transmitting node uses at least one resource block")

    @classmethod
    def from_dbm(cls, rho_dbm: float, epsilon: float, p_max_dbm: float, n_prbs_used: float = 1.0):
        return cls(
            rho_mw=10.0 ** (rho_dbm / 10.0),
            epsilon=epsilon,
            p_max_total_mw=10.0 ** (p_max_dbm / 10.0),
            n_prbs_used=n_prbs_used,
        )

    @property
    def cap_mw(self) -> float:
        return self.p_max_total_mw / self.n_prbs_used


def tx_power_per_prb(large_scale_fading, pc: PowerControlParams):
    """Transmit power per resource block: min(cap, rho * zeta^epsilon)."""
    zeta = np.asarray(large_scale_fading, dtype=float)
    scalar = zeta.ndim == 0
    zeta = np.atleast_1d(zeta)
    if np.any(zeta <= 0.0):
        raise DomainError("large-scale fading must be positive")
    out = np.minimum(pc.cap_mw, pc.rho_mw * zeta**pc.epsilon)
    return float(out[0]) if scalar else out


def saturation_distance(
    cond: Condition,
    pc: PowerControlParams,
    table: PropagationTable,
    gain: float = 1.0,
) -> float:
    """UAV pair distance at which the power cap starts to bind."""
    if pc.epsilon == 0.0:
        raise DomainError("saturation distance undefined for epsilon = 0")
    alpha = table.alpha(LinkClass.UU, cond)
    tau_hat = table.ref_linear(LinkClass.UU, cond)
    return (gain / tau_hat) ** (1.0 / alpha) * (pc.cap_mw / pc.rho_mw) ** (
        1.0 / (alpha * pc.epsilon)
    )


def _u2u_zeta(r, cond: Condition, table: PropagationTable, gain: float):
    alpha = table.alpha(LinkClass.UU, cond)
    return table.ref_linear(LinkClass.UU, cond) * np.asarray(r, dtype=float) ** alpha / gain


def mean_uav_power(
    dist: U2UDistanceDist,
    pc: PowerControlParams,
    table: PropagationTable,
    los: LosModelParams,
    uav_height_m: float,
    gain: float = 1.0,
) -> float:
    """Average transmit power of a UAV under fractional power control.

    Decomposes the distance integral over the blockage rings (the LoS
    probability is constant inside each), with the uncapped branch in
    closed form through the lower incomplete gamma function and the
    capped branch as exponential differences.
    """
    if pc.epsilon == 0.0:
        return min(pc.cap_mw, pc.rho_mw)

    sigma2 = dist.scale**2
    norm = dist.truncation_mass
    r_m = dist.max_dist
    total = 0.0
    for cond in (Condition.LOS, Condition.NLOS):
        alpha = table.alpha(LinkClass.UU, cond)
        tau_hat = table.ref_linear(LinkClass.UU, cond)
        r_sat = saturation_distance(cond, pc, table, gain)
        split = min(r_sat, r_m)

        edges = list(ring_partition(los, r_m).breakpoints)
        if 0.0 < split < r_m and split not in edges:
            edges.append(split)
        edges = np.array(sorted(edges))
        mids = 0.5 * (edges[:-1] + edges[1:])
        p_cond = los_probability_profile(mids, uav_height_m, uav_height_m, los)
        if cond is Condition.NLOS:
            p_cond = 1.0 - p_cond

        y = edges**2 / (2.0 * sigma2)
        a = 1.0 + alpha * pc.epsilon / 2.0
        coeff = pc.rho_mw * (tau_hat / gain) ** pc.epsilon * (2.0 * sigma2) ** (
            alpha * pc.epsilon / 2.0
        )
        for i in range(len(mids)):
            lo, hi = edges[i], edges[i + 1]
            if hi <= split:
                seg = coeff * (
                    lower_incomplete_gamma(a, y[i + 1]) - lower_incomplete_gamma(a, y[i])
                )
            else:
                seg = pc.cap_mw * (math.exp(-y[i]) - math.exp(-y[i + 1]))
            total += p_cond[i] * seg / norm
    return float(total)
