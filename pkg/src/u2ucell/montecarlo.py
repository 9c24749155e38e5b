"""Drop-based stochastic-geometry simulator.

Independent validation oracle for the analytical tracks: realises the
station/user/UAV point processes around a typical receiver at the
origin, draws link conditions, fading and power-controlled transmit
powers, and assembles per-resource-block SINR samples.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import Condition, LinkClass
from .config import ScenarioConfig
from .curves import CoverageCurve, SharingMode
from .errors import DomainError
from .scenario import Scenario

__all__ = [
    "SinrSample",
    "Snapshot",
    "sample_ppp_disc",
    "draw_u2u_snapshot",
    "draw_gue_snapshot",
    "simulate_u2u",
    "simulate_gue",
    "ccdf_from_samples",
    "rate_ccdf",
]


@dataclass(frozen=True, slots=True)
class SinrSample:
    """Per-block SINR decomposition for one drop."""

    sinr_linear: float
    signal: float
    interference_uav: float
    interference_gue: float
    noise: float


@dataclass
class Snapshot:
    """One network realisation around the typical receiver (arrays are
    per-interferer; positions are relative to the origin receiver)."""

    kind: str  # "u2u" or "gue"
    serving_distance: float
    serving_los: bool
    serving_fading: float
    serving_power: float
    uav_positions: np.ndarray
    uav_serving_distance: np.ndarray
    uav_serving_los: np.ndarray
    uav_link_los: np.ndarray
    uav_fading: np.ndarray
    uav_power: np.ndarray
    gue_positions: np.ndarray
    gue_serving_distance: np.ndarray
    gue_serving_los: np.ndarray
    gue_link_los: np.ndarray
    gue_fading: np.ndarray
    gue_power: np.ndarray
    sample: SinrSample


def sample_ppp_disc(density: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Poisson point process restricted to a disc; returns (n, 2) points."""
    if density < 0.0:
        raise DomainError("density must be non-negative")
    if radius <= 0.0:
        raise DomainError("radius must be positive")
    n = rng.poisson(density * math.pi * radius**2)
    r = radius * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _trunc_rayleigh(u, scale, r_max):
    """Inverse CDF of the truncated Rayleigh distance law."""
    mass = -math.expm1(-r_max**2 / (2.0 * scale**2))
    return scale * np.sqrt(-2.0 * np.log1p(-u * mass))


def _rayleigh(u, scale):
    return scale * np.sqrt(-2.0 * np.log1p(-u))


def _power_given_cond(scn, cls, own_los, x, node="uav"):
    """Per-block power from the serving distance and its drawn condition
    (one shared gain evaluation for both branches)."""
    dh = scn.height_diff(cls)
    d = np.sqrt(np.asarray(x, dtype=float) ** 2 + dh**2)
    if cls is LinkClass.GB:
        gain = np.maximum(scn.bs_gain_from_cos(scn.bs_cos_zenith(scn.heights.h_g, x)), 1e-15)
    else:
        gain = 1.0
    pc = scn.pc_u if node == "uav" else scn.pc_g
    out = np.empty_like(d)
    for mask, cond in ((own_los, Condition.LOS), (~own_los, Condition.NLOS)):
        if np.any(mask):
            tau = scn.table.ref_linear(cls, cond) * d[mask] ** scn.table.alpha(cls, cond)
            zeta = tau / (gain[mask] if np.ndim(gain) else gain)
            out[mask] = np.minimum(pc.cap_mw, pc.rho_mw * zeta**pc.epsilon)
    return out


def _received_terms(scn, cls, r2d, link_los, powers, rng, rx_gain=None):
    """Received power per interferer on link class ``cls``; draws the
    per-link fading internally."""
    dh = scn.height_diff(cls)
    d2 = np.asarray(r2d, dtype=float) ** 2 + dh**2
    fading = np.empty(d2.shape)
    tau = np.empty(d2.shape)
    for mask, cond in ((link_los, Condition.LOS), (~link_los, Condition.NLOS)):
        k = int(mask.sum())
        if k:
            m = scn.table.m(cls, cond)
            fading[mask] = rng.gamma(shape=float(m), scale=1.0 / m, size=k)
            tau[mask] = scn.table.ref_linear(cls, cond) * d2[mask] ** (
                0.5 * scn.table.alpha(cls, cond)
            )
    gain = 1.0 if rx_gain is None else rx_gain
    with np.errstate(divide="ignore"):
        return powers * fading * gain / tau, fading


def _uav_field(scn, rng, density, window):
    """Interfering UAV transmitters: radial positions plus their own
    serving-link draw which fixes the transmit power."""
    n = rng.poisson(density * math.pi * window**2)
    r = window * np.sqrt(rng.random(n))
    phi = 2.0 * math.pi * rng.random(n)
    x = _trunc_rayleigh(rng.random(n), scn.u2u_dist.scale, scn.u2u_dist.max_dist)
    own_los = rng.random(n) < scn.p_los(LinkClass.UU, x)
    power = _power_given_cond(scn, LinkClass.UU, own_los, x, node="uav")
    return r, phi, x, own_los, power


def _gue_field(scn, rng, density, window, exclude_closer_than_own: bool):
    """One active user per station of a fresh station process. With the
    exclusion flag, users closer to the origin station than to their own
    are dropped (they would have associated at the origin instead),
    which realises the thinned non-homogeneous interferer field."""
    sigma = scn.sigma_g if math.isfinite(scn.sigma_g) else 1.0
    margin = 4.0 * sigma if density > 0.0 else 0.0
    n = rng.poisson(density * math.pi * (window + margin) ** 2)
    r_b = (window + margin) * np.sqrt(rng.random(n))
    phi_b = 2.0 * math.pi * rng.random(n)
    x = _rayleigh(rng.random(n), sigma)
    phi_x = 2.0 * math.pi * rng.random(n)
    r = np.sqrt(r_b**2 + x**2 + 2.0 * r_b * x * np.cos(phi_x - phi_b))
    own_los = rng.random(n) < scn.p_los(LinkClass.GB, x)
    if exclude_closer_than_own:
        keep = x < r
        r, phi_b, phi_x, x, own_los = r[keep], phi_b[keep], phi_x[keep], x[keep], own_los[keep]
        r_b = r_b[keep]
    power = _power_given_cond(scn, LinkClass.GB, own_los, x, node="gue")
    return r, (r_b, phi_b, x, phi_x), own_los, power


def _positions(r_b, phi_b, x, phi_x):
    bx = r_b * np.cos(phi_b)
    by = r_b * np.sin(phi_b)
    return np.column_stack([bx + x * np.cos(phi_x), by + x * np.sin(phi_x)])


def _draw_u2u(scn: Scenario, rng: np.random.Generator, collect: bool):
    window = scn.cfg.sim.window_radius_m

    r_u = float(_trunc_rayleigh(rng.random(), scn.u2u_dist.scale, scn.u2u_dist.max_dist))
    serving_los = bool(rng.random() < scn.p_los(LinkClass.UU, r_u))
    cond = Condition.LOS if serving_los else Condition.NLOS
    zeta = float(scn.zeta(LinkClass.UU, cond, r_u))
    p_tx = float(scn.uav_tx_power(r_u, cond))
    m_serv = scn.table.m(LinkClass.UU, cond)
    psi = float(rng.gamma(m_serv, 1.0 / m_serv))
    signal = p_tx * psi / zeta

    r_uav, phi_uav, x_own, own_los, p_uav = _uav_field(scn, rng, scn.lam_u_hat, window)
    link_los = rng.random(r_uav.size) < scn.p_los(LinkClass.UU, r_uav)
    i_uav_terms, f_uav = _received_terms(scn, LinkClass.UU, r_uav, link_los, p_uav, rng)

    lam_gue = scn.lam_b if scn.include_gue_on_uav else 0.0
    r_gue, gue_geom, own_los_g, p_gue = _gue_field(scn, rng, lam_gue, window, False)
    link_los_g = rng.random(r_gue.size) < scn.p_los(LinkClass.GU, r_gue)
    i_gue_terms, f_gue = _received_terms(scn, LinkClass.GU, r_gue, link_los_g, p_gue, rng)

    i_uav = float(i_uav_terms.sum())
    i_gue = float(i_gue_terms.sum())
    sample = SinrSample(
        sinr_linear=signal / (scn.noise_mw + i_uav + i_gue),
        signal=signal,
        interference_uav=i_uav,
        interference_gue=i_gue,
        noise=scn.noise_mw,
    )
    if not collect:
        return sample
    return Snapshot(
        kind="u2u",
        serving_distance=r_u,
        serving_los=serving_los,
        serving_fading=psi,
        serving_power=p_tx,
        uav_positions=np.column_stack(
            [r_uav * np.cos(phi_uav), r_uav * np.sin(phi_uav)]
        ),
        uav_serving_distance=x_own,
        uav_serving_los=own_los,
        uav_link_los=link_los,
        uav_fading=f_uav,
        uav_power=p_uav,
        gue_positions=_positions(*gue_geom),
        gue_serving_distance=gue_geom[2],
        gue_serving_los=own_los_g,
        gue_link_los=link_los_g,
        gue_fading=f_gue,
        gue_power=p_gue,
        sample=sample,
    )


def _draw_gue(scn: Scenario, rng: np.random.Generator, collect: bool):
    if scn.lam_b <= 0.0:
        raise DomainError("uplink simulation needs a positive station density")
    window = scn.cfg.sim.window_radius_m

    r_g = float(_rayleigh(rng.random(), scn.sigma_g))
    serving_los = bool(rng.random() < scn.p_los(LinkClass.GB, r_g))
    cond = Condition.LOS if serving_los else Condition.NLOS
    zeta = float(scn.zeta(LinkClass.GB, cond, r_g))
    p_tx = float(scn.gue_tx_power(r_g, cond))
    m_serv = scn.table.m(LinkClass.GB, cond)
    psi = float(rng.gamma(m_serv, 1.0 / m_serv))
    signal = p_tx * psi / zeta

    r_uav, phi_uav, x_own, own_los, p_uav = _uav_field(
        scn, rng, scn.uav_density_at_station, window
    )
    link_los = rng.random(r_uav.size) < scn.p_los(LinkClass.UB, r_uav)
    gain_uav = np.maximum(
        scn.bs_gain_from_cos(scn.bs_cos_zenith(scn.heights.h_u, r_uav)), 0.0
    )
    i_uav_terms, f_uav = _received_terms(
        scn, LinkClass.UB, r_uav, link_los, p_uav, rng, rx_gain=gain_uav
    )

    r_gue, gue_geom, own_los_g, p_gue = _gue_field(scn, rng, scn.lam_b, window, True)
    link_los_g = rng.random(r_gue.size) < scn.p_los(LinkClass.GB, r_gue)
    gain_gue = np.maximum(
        scn.bs_gain_from_cos(scn.bs_cos_zenith(scn.heights.h_g, r_gue)), 0.0
    )
    i_gue_terms, f_gue = _received_terms(
        scn, LinkClass.GB, r_gue, link_los_g, p_gue, rng, rx_gain=gain_gue
    )

    i_uav = float(i_uav_terms.sum())
    i_gue = float(i_gue_terms.sum())
    sample = SinrSample(
        sinr_linear=signal / (scn.noise_mw + i_uav + i_gue),
        signal=signal,
        interference_uav=i_uav,
        interference_gue=i_gue,
        noise=scn.noise_mw,
    )
    if not collect:
        return sample
    return Snapshot(
        kind="gue",
        serving_distance=r_g,
        serving_los=serving_los,
        serving_fading=psi,
        serving_power=p_tx,
        uav_positions=np.column_stack(
            [r_uav * np.cos(phi_uav), r_uav * np.sin(phi_uav)]
        ),
        uav_serving_distance=x_own,
        uav_serving_los=own_los,
        uav_link_los=link_los,
        uav_fading=f_uav,
        uav_power=p_uav,
        gue_positions=_positions(*gue_geom),
        gue_serving_distance=gue_geom[2],
        gue_serving_los=own_los_g,
        gue_link_los=link_los_g,
        gue_fading=f_gue,
        gue_power=p_gue,
        sample=sample,
    )


def draw_u2u_snapshot(cfg_or_scn, mode: SharingMode | None, rng: np.random.Generator) -> Snapshot:
    """One full drop (with interferer arrays) around a typical UAV receiver."""
    scn = cfg_or_scn if isinstance(cfg_or_scn, Scenario) else Scenario(cfg_or_scn, mode)
    return _draw_u2u(scn, rng, collect=True)


def draw_gue_snapshot(cfg_or_scn, mode: SharingMode | None, rng: np.random.Generator) -> Snapshot:
    """One full drop (with interferer arrays) around a typical station."""
    scn = cfg_or_scn if isinstance(cfg_or_scn, Scenario) else Scenario(cfg_or_scn, mode)
    return _draw_gue(scn, rng, collect=True)


def _run_chunk(args):
    cfg, mode, seeds, kind = args
    scn = Scenario(cfg, mode)
    draw = _draw_u2u if kind == "u2u" else _draw_gue
    out = []
    for ss in seeds:
        rng = np.random.Generator(np.random.PCG64(ss))
        out.append(draw(scn, rng, collect=False))
    return out


def _simulate(cfg, mode, n_drops, seed, kind, workers=None):
    if n_drops < 1:
        raise DomainError("need at least one drop")
    workers = workers if workers is not None else cfg.sim.workers
    seeds = np.random.SeedSequence(seed).spawn(n_drops)
    if workers <= 1:
        return _run_chunk((cfg, mode, seeds, kind))
    stride = [list(range(n_drops))[i::workers] for i in range(workers)]
    chunks = [[seeds[i] for i in idxs] for idxs in stride]
    results: list = [None] * n_drops
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [(cfg, mode, c, kind) for c in chunks])
        for idxs, part in zip(stride, parts):
            for i, s in zip(idxs, part):
                results[i] = s
    return results


def simulate_u2u(cfg: ScenarioConfig, mode: SharingMode, n_drops: int, seed: int, workers=None):
    """Independent SINR drops for the typical UAV pair link."""
    return _simulate(cfg, mode, n_drops, seed, "u2u", workers)


def simulate_gue(cfg: ScenarioConfig, mode: SharingMode, n_drops: int, seed: int, workers=None):
    """Independent SINR drops for the typical uplink."""
    return _simulate(cfg, mode, n_drops, seed, "gue", workers)


def _sinr_array(samples):
    if isinstance(samples, np.ndarray):
        return samples.astype(float)
    return np.asarray([s.sinr_linear for s in samples], dtype=float)


def ccdf_from_samples(samples, thresholds_db) -> CoverageCurve:
    """Empirical coverage with binomial standard errors."""
    sinr = _sinr_array(samples)
    if sinr.size == 0:
        raise DomainError("need at least one sample")
    thr = np.asarray(thresholds_db, dtype=float)
    ordered = np.sort(sinr)
    n = ordered.size
    above = n - np.searchsorted(ordered, 10.0 ** (thr / 10.0), side="right")
    p = above / n
    return CoverageCurve(thr, p, np.sqrt(p * (1.0 - p) / n))


def rate_ccdf(curve_or_samples, bandwidth_hz: float, rate_thresholds) -> CoverageCurve:
    """CCDF of the achievable rate over the allocated bandwidth.

    P[rate > T] equals the SINR coverage at 2^(T/B) - 1. Samples are
    thresholded exactly; a coverage curve is interpolated on its own
    grid (which must span the mapped range).
    """
    if bandwidth_hz <= 0.0:
        raise DomainError("bandwidth must be positive")
    rate_thr = np.asarray(rate_thresholds, dtype=float)
    sinr_thr = np.power(2.0, rate_thr / bandwidth_hz) - 1.0
    if isinstance(curve_or_samples, CoverageCurve):
        curve = curve_or_samples
        with np.errstate(divide="ignore"):
            thr_db = 10.0 * np.log10(sinr_thr)
        cov = np.interp(thr_db, curve.thresholds_db, curve.coverage)
        return CoverageCurve(rate_thr, cov)
    sinr = _sinr_array(curve_or_samples)
    if sinr.size == 0:
        raise DomainError("need at least one sample")
    ordered = np.sort(sinr)
    n = ordered.size
    above = n - np.searchsorted(ordered, sinr_thr, side="right")
    p = above / n
    return CoverageCurve(rate_thr, p, np.sqrt(p * (1.0 - p) / n))
