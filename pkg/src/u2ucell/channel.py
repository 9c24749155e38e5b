"""Propagation primitives.

Building-blockage LoS probability and its ring structure, distance
dependent path loss, the base-station array pattern, Nakagami fading
(exact and fitted CDFs plus sampling) and the link-distance laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "LinkClass",
    "Condition",
    "LosModelParams",
    "AntennaConfig",
    "LinkGeometry",
    "U2UDistanceDist",
    "RingPartition",
    "PropagationTable",
    "urban_propagation_table",
    "los_probability",
    "los_probability_profile",
    "ring_partition",
    "path_loss",
    "bs_array_gain",
    "total_gain",
    "nakagami_ccdf",
    "nakagami_ccdf_fitted",
    "NAKAGAMI_FIT_B",
    "sample_fading",
    "u2u_distance_pdf",
    "gue_serving_distance_pdf",
]


class LinkClass(Enum):
    """Transmitter/receiver pairing of a radio link."""

    GB = "gb"  # ground user to base station
    UB = "ub"  # UAV to base station
    GU = "gu"  # ground user to UAV
    UU = "uu"  # UAV to UAV


class Condition(Enum):
    LOS = "los"
    NLOS = "nlos"


@dataclass(frozen=True)
class LosModelParams:
    """Environment parameters of the building-blockage LoS model.

    a1: built-up land fraction, a2: buildings per km^2, a3: building
    height scale in metres. Defaults model a dense urban layout.
    """

    a1: float = 0.3
    a2: float = 500.0
    a3: float = 20.0

    def __post_init__(self):
        if min(self.a1, self.a2, self.a3) <= 0.0:
            raise DomainError("LoS model parameters must be positive")

    @property
    def breakpoint_spacing(self) -> float:
        """Horizontal distance (m) between consecutive blockage rings."""
        return 1000.0 / math.sqrt(self.a1 * self.a2)


@dataclass(frozen=True)
class AntennaConfig:
    """Vertical uniform linear array at the base station."""

    n_elements: int = 8
    downtilt_rad: float = math.radians(102.0)
    element_max_gain: float = 10.0 ** 0.8  # linear power gain (8 dBi)
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.n_elements < 1:
            raise DomainError("array needs at least one element")
        if not 0.0 < self.downtilt_rad < math.pi:
            raise DomainError("downtilt must lie strictly inside (0, pi)")
        if self.element_max_gain <= 0.0:
            raise DomainError("element gain must be positive")


@dataclass(frozen=True)
class LinkGeometry:
    """Horizontal separation plus endpoint heights of one link."""

    r2d: float
    h_tx: float
    h_rx: float

    def __post_init__(self):
        if self.r2d < 0.0:
            raise DomainError("horizontal distance must be non-negative")

    @property
    def height_diff(self) -> float:
        return abs(self.h_tx - self.h_rx)

    @property
    def d3d(self) -> float:
        return math.hypot(self.r2d, self.h_tx - self.h_rx)


@dataclass(frozen=True)
class U2UDistanceDist:
    """Truncated Rayleigh law of the transmitter-receiver UAV distance."""

    mean_dist: float
    max_dist: float

    def __post_init__(self):
        if self.mean_dist <= 0.0 or self.max_dist <= 0.0:
            raise DomainError("distances must be positive")

    @property
    def scale(self) -> float:
        return math.sqrt(2.0 / math.pi) * self.mean_dist

    @property
    def truncation_mass(self) -> float:
        """Probability mass kept by the truncation (normalisation)."""
        return -math.expm1(-self.max_dist**2 / (2.0 * self.scale**2))


@dataclass(frozen=True)
class RingPartition:
    """Radii at which the piecewise-constant LoS probability jumps."""

    breakpoints: np.ndarray
    truncation_radius: float

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp[0] != 0.0 or np.any(np.diff(bp) <= 0.0):
            raise DomainError("breakpoints must start at 0 and increase strictly")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def lower(self) -> np.ndarray:
        return self.breakpoints[:-1]

    @property
    def upper(self) -> np.ndarray:
        return self.breakpoints[1:]

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


_PATH_KEYS = {
    (LinkClass.GB, Condition.LOS),
    (LinkClass.GB, Condition.NLOS),
    (LinkClass.UB, Condition.LOS),
    (LinkClass.UB, Condition.NLOS),
    (LinkClass.GU, Condition.LOS),
    (LinkClass.GU, Condition.NLOS),
    (LinkClass.UU, Condition.LOS),
    (LinkClass.UU, Condition.NLOS),
}


@dataclass(frozen=True)
class PropagationTable:
    """Reference path loss (dB), exponent and Nakagami m per link/condition."""

    ref_path_loss_db: dict
    path_loss_exp: dict
    nakagami_m: dict

    def __post_init__(self):
        for name, table in (
            ("ref_path_loss_db", self.ref_path_loss_db),
            ("path_loss_exp", self.path_loss_exp),
            ("nakagami_m", self.nakagami_m),
        ):
            if set(table.keys()) != _PATH_KEYS:
                raise DomainError(f"{name} must cover all link/condition pairs")
        for key, alpha in self.path_loss_exp.items():
            if alpha < 2.0:
                raise DomainError(f"path loss exponent below 2 for {key}")
        for key, m in self.nakagami_m.items():
            if int(m) != m or m < 1:
                raise DomainError(f"Nakagami m must be a positive integer for {key}")
        for cls in LinkClass:
            if self.nakagami_m[(cls, Condition.LOS)] < self.nakagami_m[(cls, Condition.NLOS)]:
                raise DomainError(f"LoS Nakagami m below NLoS for {cls}")

    def ref_db(self, cls: LinkClass, cond: Condition) -> float:
        return self.ref_path_loss_db[(cls, cond)]

    def ref_linear(self, cls: LinkClass, cond: Condition) -> float:
        return 10.0 ** (self.ref_path_loss_db[(cls, cond)] / 10.0)

    def alpha(self, cls: LinkClass, cond: Condition) -> float:
        return self.path_loss_exp[(cls, cond)]

    def m(self, cls: LinkClass, cond: Condition) -> int:
        return int(self.nakagami_m[(cls, cond)])


_DEFAULT_NAKAGAMI = {
    (LinkClass.GB, Condition.LOS): 3,
    (LinkClass.GB, Condition.NLOS): 1,
    (LinkClass.GU, Condition.LOS): 3,
    (LinkClass.GU, Condition.NLOS): 1,
    (LinkClass.UB, Condition.LOS): 5,
    (LinkClass.UB, Condition.NLOS): 1,
    (LinkClass.UU, Condition.LOS): 5,
    (LinkClass.UU, Condition.NLOS): 1,
}


def urban_propagation_table(
    carrier_ghz: float,
    uav_height_m: float,
    nakagami_m: dict | None = None,
) -> PropagationTable:
    """Urban macro propagation table at the given carrier and UAV height.

    Height-dependent exponents are evaluated once here; UAV heights below
    1 m are rejected to keep the log arguments sane.
    """
    if carrier_ghz <= 0.0:
        raise DomainError("carrier frequency must be positive")
    if uav_height_m < 1.0:
        raise DomainError("UAV height must be at least 1 m")
    fc = carrier_ghz
    lg_h = math.log10(uav_height_m)
    ref = {
        (LinkClass.GB, Condition.LOS): 28.0 + 20.0 * math.log10(fc),
        (LinkClass.GB, Condition.NLOS): 13.54 + 20.0 * math.log10(fc),
        (LinkClass.UB, Condition.LOS): 28.0 + 20.0 * math.log10(fc),
        (LinkClass.UB, Condition.NLOS): -17.5 + 20.0 * math.log10(40.0 * math.pi * fc / 3.0),
        (LinkClass.GU, Condition.LOS): 30.9 + 20.0 * math.log10(fc),
        (LinkClass.GU, Condition.NLOS): 32.4 + 20.0 * math.log10(fc),
        (LinkClass.UU, Condition.LOS): 28.0 + 20.0 * math.log10(fc),
        (LinkClass.UU, Condition.NLOS): -17.5 + 20.0 * math.log10(40.0 * math.pi * fc / 3.0),
    }
    exp = {
        (LinkClass.GB, Condition.LOS): 2.2,
        (LinkClass.GB, Condition.NLOS): 3.9,
        (LinkClass.UB, Condition.LOS): 2.2,
        (LinkClass.UB, Condition.NLOS): 4.6 - 0.7 * lg_h,
        (LinkClass.GU, Condition.LOS): 2.225 - 0.05 * lg_h,
        (LinkClass.GU, Condition.NLOS): 4.32 - 0.76 * lg_h,
        (LinkClass.UU, Condition.LOS): 2.2,
        (LinkClass.UU, Condition.NLOS): 4.6 - 0.7 * lg_h,
    }
    return PropagationTable(
        ref_path_loss_db=ref,
        path_loss_exp=exp,
        nakagami_m=dict(nakagami_m) if nakagami_m is not None else dict(_DEFAULT_NAKAGAMI),
    )


def los_probability_profile(
    r2d, h_a: float, h_b: float, params: LosModelParams
):
    """LoS probability at horizontal distances ``r2d`` (array friendly).

    The blockage count at distance r is floor(r sqrt(a1 a2) / 1000); the
    obstruction heights are sampled at the (j + 1/2)/n points of the
    straight line between the endpoint heights. An empty product gives 1.
    """
    r = np.asarray(r2d, dtype=float)
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    if np.any(r < 0.0):
        raise DomainError("distance must be non-negative")
    n_build = np.floor(r / params.breakpoint_spacing).astype(int)
    out = np.ones_like(r)
    n_max = int(n_build.max(initial=0))
    two_a3_sq = 2.0 * params.a3**2
    for n in range(1, n_max + 1):
        mask = n_build == n
        if not np.any(mask):
            continue
        j = np.arange(n)
        heights = h_a - (j + 0.5) * (h_a - h_b) / n
        factors = 1.0 - np.exp(-(heights**2) / two_a3_sq)
        out[mask] = np.prod(factors)
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def los_probability(geom: LinkGeometry, params: LosModelParams) -> float:
    """LoS probability of one link under the building-blockage model."""
    return float(los_probability_profile(geom.r2d, geom.h_tx, geom.h_rx, params))


def ring_partition(params: LosModelParams, truncation_radius: float) -> RingPartition:
    """Radii bounding the annuli on which the LoS probability is constant."""
    if truncation_radius <= 0.0:
        raise DomainError("truncation radius must be positive")
    step = params.breakpoint_spacing
    inner = np.arange(0.0, truncation_radius, step)
    if inner[-1] < truncation_radius:
        breakpoints = np.append(inner, truncation_radius)
    else:
        breakpoints = inner
    return RingPartition(breakpoints=breakpoints, truncation_radius=float(truncation_radius))


def path_loss(
    geom: LinkGeometry, cls: LinkClass, cond: Condition, table: PropagationTable
) -> float:
    """Linear path loss tau = tau_hat * d^alpha for one link."""
    d = geom.d3d
    if d <= 0.0:
        raise DomainError("path loss undefined at zero distance")
    return table.ref_linear(cls, cond) * d ** table.alpha(cls, cond)


def bs_array_gain(zenith_rad, cfg: AntennaConfig):
    """Base-station pattern: element directivity times the array factor.

    The 0/0 points of the array factor (boresight and grating angles) are
    resolved by their limit value N. Accepts scalars or arrays.
    """
    theta = np.asarray(zenith_rad, dtype=float)
    scalar = theta.ndim == 0
    theta = np.atleast_1d(theta)
    if np.any((theta < 0.0) | (theta > math.pi)):
        raise DomainError("zenith angle must lie in [0, pi]")
    n = cfg.n_elements
    x = 0.5 * math.pi * (np.cos(theta) - math.cos(cfg.downtilt_rad))
    sin_x = np.sin(x)
    singular = np.abs(np.cos(theta) - math.cos(cfg.downtilt_rad)) < 1e-9
    # grating points (sin x = 0 away from boresight) share the same limit
    singular |= np.abs(sin_x) < 1e-12
    array_factor = np.full_like(theta, float(n))
    ok = ~singular
    array_factor[ok] = np.sin(n * x[ok]) ** 2 / (n * sin_x[ok] ** 2)
    gain = cfg.element_max_gain * np.sin(theta) ** 2 * array_factor
    return float(gain[0]) if scalar else gain


def total_gain(cls: LinkClass, zenith_rad, cfg: AntennaConfig):
    """Product of endpoint antenna gains.

    Ground users and UAVs are omnidirectional with unit gain, so only
    links terminating at a base station pick up the array pattern.
    """
    if cls in (LinkClass.GB, LinkClass.UB):
        return bs_array_gain(zenith_rad, cfg)
    theta = np.asarray(zenith_rad, dtype=float)
    return 1.0 if theta.ndim == 0 else np.ones_like(theta)


def nakagami_ccdf(omega, m: int):
    """P[fading power > omega] for unit-mean Nakagami-m power fading."""
    if int(m) != m or m < 1:
        raise DomainError("Nakagami m must be a positive integer")
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w < 0.0):
        raise DomainError("fading power must be non-negative")
    m = int(m)
    mw = m * w
    total = np.zeros_like(w)
    term = np.ones_like(w)
    for i in range(m):
        if i > 0:
            term = term * mw / i
        total += term
    out = total * np.exp(-mw)
    return float(out[0]) if scalar else out


# Exponential-mixture fit coefficients b(m) for the Nakagami power CDF
# approximation (1 - e^(-b w))^m, m = 1..10 (curve-fitted constants).
NAKAGAMI_FIT_B = {
    1: 1.0,
    2: 1.487,
    3: 1.81,
    4: 2.052,
    5: 2.246,
    6: 2.408,
    7: 2.546,
    8: 2.668,
    9: 2.775,
    10: 2.872,
}


def nakagami_ccdf_fitted(omega, m: int):
    """Fitted CCDF 1 - (1 - e^(-b w))^m with the tabulated b(m)."""
    if m not in NAKAGAMI_FIT_B:
        raise DomainError(f"no fit constant tabulated for m = {m}")
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    if np.any(w < 0.0):
        raise DomainError("fading power must be non-negative")
    out = np.ones_like(w)
    pos = w > 0.0
    out[pos] = -np.expm1(m * np.log1p(-np.exp(-NAKAGAMI_FIT_B[m] * w[pos])))
    return float(out[0]) if scalar else out


def sample_fading(m: int, rng: np.random.Generator, size=None):
    """Unit-mean Nakagami-m power fading draws (Gamma with shape m)."""
    if int(m) != m or m < 1:
        raise DomainError("Nakagami m must be a positive integer")
    return rng.gamma(shape=int(m), scale=1.0 / int(m), size=size)


def u2u_distance_pdf(r, dist: U2UDistanceDist):
    """Density of the truncated Rayleigh UAV pair distance."""
    rr = np.asarray(r, dtype=float)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    if np.any(rr < 0.0):
        raise DomainError("distance must be non-negative")
    s2 = dist.scale**2
    out = rr * np.exp(-(rr**2) / (2.0 * s2)) / (s2 * dist.truncation_mass)
    out = np.where(rr < dist.max_dist, out, 0.0)
    return float(out[0]) if scalar else out


def gue_serving_distance_pdf(r, bs_density: float):
    """Rayleigh density of the distance from a ground user to its station."""
    if bs_density <= 0.0:
        raise DomainError("base-station density must be positive")
    rr = np.asarray(r, dtype=float)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    if np.any(rr < 0.0):
        raise DomainError("distance must be non-negative")
    out = 2.0 * math.pi * bs_density * rr * np.exp(-math.pi * bs_density * rr**2)
    return float(out[0]) if scalar else out
