"""Exact analytical coverage track.

The aggregate interference seen by the typical receiver is characterised
by its Laplace transform. Each interferer class contributes ring sums of
a closed-form kernel (the fading-averaged incomplete ring integral,
expressed through the Gauss hypergeometric function), mixed over the
interferer's own serving-link law which sets its transmit power.
Coverage follows from the transform and its derivatives up to the
serving link's Nakagami order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .channel import Condition, LinkClass, u2u_distance_pdf
from .config import ScenarioConfig
from .curves import CoverageCurve, SharingMode
from .errors import ConfigError, DomainError, ToleranceError
from .scenario import Scenario
from .specfun import DEFAULT_ACCURACY, gauss_2f1, pochhammer
from .specfun import _gamma_real  # reflection-capable gamma for internal use

__all__ = [
    "LaplacianEvaluation",
    "SharingMode",
    "CoverageCurve",
    "psi_kernel",
    "interference_functional_uu_gu",
    "interference_functional_ug",
    "interference_functional_gg",
    "build_u2u_laplacian",
    "build_gue_laplacian",
    "laplacian_u2u",
    "laplacian_gue",
    "laplacian_derivatives",
    "coverage_u2u_exact",
    "coverage_gue_exact",
]


@dataclass
class LaplacianEvaluation:
    """Laplace transform of the aggregate interference at one argument,
    with derivatives for orders 0 .. len(derivatives)-1."""

    value: float
    derivatives: list[float] = field(default_factory=list)


# ---------------------------------------------------------------------------
# kernel: fading-averaged incomplete ring integral
# ---------------------------------------------------------------------------


def _check_alpha(alpha: float):
    if abs(alpha - 2.0) < 1e-9:
        raise DomainError(
            "path loss exponent of exactly 2 makes the ring kernel singular; "
            "perturb alpha away from 2"
        )
    if alpha < 2.0:
        raise DomainError("ring kernel requires alpha >= 2")


def _psi_eval(u, r, gamma, h, m, alpha, orders, acc=DEFAULT_ACCURACY):
    """Kernel values and derivatives in the composite argument u = s * P.

    ``u``, ``r`` and ``gamma`` (antenna gain over reference loss)
    broadcast elementwise; returns ``{order: array}`` of the broadcast
    shape. The boundary at zero 3-D distance takes the analytic limit of
    the full half-line integral.
    """
    _check_alpha(alpha)
    beta = 2.0 / alpha
    m = int(m)
    u_b, r_b, g_b = np.broadcast_arrays(
        np.asarray(u, dtype=float), np.asarray(r, dtype=float), np.asarray(gamma, dtype=float)
    )
    shape = u_b.shape
    u_f = u_b.reshape(-1)
    d2 = (r_b**2 + h**2).reshape(-1)
    g_f = g_b.reshape(-1)
    out = {i: np.zeros(u_f.shape) for i in orders}
    max_order = max(orders)

    pos = d2 > 0.0
    zero_d = ~pos
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        if np.any(pos):
            up, d2p, gp = u_f[pos], d2[pos], g_f[pos]
            l1 = gp * d2p ** (-alpha / 2.0)
            l2 = l1 / m
            l3 = gp * d2p ** (1.0 - alpha / 2.0) / (2.0 * (1.0 - beta))
            z = -l2 * up
            f_raw = [
                np.asarray(gauss_2f1(1.0 + m + i, 1.0 - beta + i, 2.0 - beta + i, z, acc))
                for i in range(max_order + 1)
            ]
            f_der = [f_raw[0]]
            for i in range(1, max_order + 1):
                coef = (
                    pochhammer(1.0 + m, i)
                    * pochhammer(1.0 - beta, i)
                    / pochhammer(2.0 - beta, i)
                )
                f_der.append((-l2) ** i * coef * f_raw[i])
            for i in orders:
                if i == 0:
                    val = d2p / 2.0 * (-np.expm1(-m * np.log1p(l2 * up))) - up * l3 * f_der[0]
                else:
                    pow_term = (-1.0) ** i * pochhammer(float(m), i) * l2**i * (
                        1.0 + l2 * up
                    ) ** (-(m + i))
                    val = -d2p / 2.0 * pow_term - (up * l3 * f_der[i] + i * l3 * f_der[i - 1])
                out[i][pos] = val
        if np.any(zero_d):
            uz, gz = u_f[zero_d], g_f[zero_d]
            c0 = (
                _gamma_real(1.0 - beta)
                * _gamma_real(m + beta)
                / (2.0 * _gamma_real(float(m)) * m**beta)
            )
            for i in orders:
                fall = 1.0
                for j in range(i):
                    fall *= beta - j
                vals = np.zeros_like(uz)
                up_mask = uz > 0.0
                vals[up_mask] = (
                    -c0 * fall * (gz[up_mask] * uz[up_mask]) ** beta * uz[up_mask] ** (-float(i))
                )
                if i > 0:
                    # derivative of u^beta blows up at the origin
                    vals[~up_mask] = math.copysign(math.inf, -c0 * fall)
                out[i][zero_d] = vals
    return {i: out[i].reshape(shape) for i in orders}


def psi_kernel(s, r, h: float, m: int, alpha: float, tx_power: float):
    """Ring kernel at composite argument ``s``, boundary radius ``r``,
    height difference ``h``, fading order ``m``, path loss exponent
    ``alpha`` and interferer transmit power."""
    if np.any(np.asarray(s, dtype=float) < 0.0):
        raise DomainError("kernel argument s must be non-negative")
    if np.any(np.asarray(r, dtype=float) < 0.0):
        raise DomainError("radius must be non-negative")
    if int(m) != m or m < 1:
        raise DomainError("fading order m must be a positive integer")
    u = np.asarray(s, dtype=float) * float(tx_power)
    res = _psi_eval(u, r, 1.0, float(h), int(m), float(alpha), orders=(0,))[0]
    return float(res) if res.ndim == 0 else res


# ---------------------------------------------------------------------------
# ring sums
# ---------------------------------------------------------------------------


class _RingSums:
    """p-weighted kernel differences over the blockage annuli of one
    interference link class and condition."""

    def __init__(self, edges, p_ring, gamma, h, m, alpha, acc=DEFAULT_ACCURACY):
        self.edges = np.asarray(edges, dtype=float)
        self.p = np.asarray(p_ring, dtype=float)
        self.gamma = gamma  # scalar, or per-ring array for station-side links
        self.h = float(h)
        self.m = int(m)
        self.alpha = float(alpha)
        self.acc = acc
        self.uniform = np.ndim(gamma) == 0

    def term_matrix(self, u, orders):
        """Per-ring contributions, shape ``u.shape + (n_rings,)``."""
        u = np.asarray(u, dtype=float)[..., None]
        if self.uniform:
            psi = _psi_eval(u, self.edges, self.gamma, self.h, self.m, self.alpha, orders, self.acc)
            diffs = {i: psi[i][..., 1:] - psi[i][..., :-1] for i in orders}
        else:
            lo = _psi_eval(u, self.edges[:-1], self.gamma, self.h, self.m, self.alpha, orders, self.acc)
            hi = _psi_eval(u, self.edges[1:], self.gamma, self.h, self.m, self.alpha, orders, self.acc)
            diffs = {i: hi[i] - lo[i] for i in orders}
        # rings with zero occupation contribute nothing even when the
        # kernel difference is infinite (origin boundary at order >= 1)
        zero_p = self.p == 0.0
        out = {}
        with np.errstate(invalid="ignore"):
            for i in orders:
                t = diffs[i] * self.p
                if np.any(zero_p):
                    t[..., zero_p] = 0.0
                out[i] = t
        return out

    def sums(self, u, orders):
        terms = self.term_matrix(u, orders)
        return {i: terms[i].sum(axis=-1) for i in orders}

    def tail_sums(self, u, orders):
        """``tails[..., j]`` sums the rings with index >= j; last entry 0."""
        terms = self.term_matrix(u, orders)
        out = {}
        for i in orders:
            t = terms[i]
            tails = np.zeros(t.shape[:-1] + (t.shape[-1] + 1,))
            tails[..., :-1] = np.cumsum(t[..., ::-1], axis=-1)[..., ::-1]
            out[i] = tails
        return out

    def ring_index(self, x):
        idx = np.searchsorted(self.edges, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.p) - 1)

    def psi_at(self, u, radius, ring_idx, orders):
        """Kernel at arbitrary radii using the gain of their host ring."""
        gamma = self.gamma if self.uniform else np.asarray(self.gamma)[ring_idx]
        return _psi_eval(u, radius, gamma, self.h, self.m, self.alpha, orders, self.acc)


def _refined_edges(scn: Scenario, base_edges: np.ndarray, node_height: float) -> np.ndarray:
    """Split annuli until the arrival direction at the station moves by at
    most the configured cosine step inside each; keeps the per-ring
    constant-gain treatment honest across the array pattern's lobes."""
    max_dc = scn.cfg.numerics.gain_refine_max_dcos
    dh = node_height - scn.heights.h_b

    def cos_at(r):
        return dh / math.hypot(r, dh)

    out = [base_edges[0]]
    for lo, hi in zip(base_edges[:-1], base_edges[1:]):
        dc = abs(cos_at(hi) - cos_at(lo))
        n_sub = max(1, int(math.ceil(dc / max_dc)))
        for k in range(1, n_sub):
            out.append(lo + (hi - lo) * k / n_sub)
        out.append(hi)
    return np.asarray(out)


def _ring_sums_for(scn: Scenario, cls: LinkClass, cond: Condition) -> _RingSums:
    edges = scn.rings().breakpoints
    at_bs = cls in (LinkClass.UB, LinkClass.GB)
    if at_bs:
        node_h = scn.heights.h_u if cls is LinkClass.UB else scn.heights.h_g
        edges = _refined_edges(scn, edges, node_h)
    mids = 0.5 * (edges[:-1] + edges[1:])
    p = scn.p_los(cls, mids)
    if cond is Condition.NLOS:
        p = 1.0 - p
    tau_hat = scn.table.ref_linear(cls, cond)
    gamma = scn.bs_gain(node_h, mids) / tau_hat if at_bs else 1.0 / tau_hat
    return _RingSums(
        edges,
        p,
        gamma,
        scn.height_diff(cls),
        scn.table.m(cls, cond),
        scn.table.alpha(cls, cond),
    )


# ---------------------------------------------------------------------------
# serving-link laws (set interferer transmit powers)
# ---------------------------------------------------------------------------


@dataclass
class _ServingLaw:
    """Quadrature mixture over an interferer's serving distance and
    serving-link condition. ``weights`` carry the full probability law;
    ``raw_weights`` omit the 2 pi lambda radial prefactor (used where
    that prefactor is squared instead)."""

    x: np.ndarray
    weights: np.ndarray
    powers: np.ndarray
    raw_weights: np.ndarray


def _panel_nodes(edges, n_pts):
    nodes, weights = np.polynomial.legendre.leggauss(n_pts)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs.append(0.5 * (lo + hi) + half * nodes)
        ws.append(half * weights)
    return np.concatenate(xs), np.concatenate(ws)


def _merge_edges(*groups, lo, hi):
    vals = {float(lo), float(hi)}
    for g in groups:
        for v in g:
            if lo < v < hi:
                vals.add(float(v))
    return np.asarray(sorted(vals))


def _cap_crossings(zeta_fn, zeta_star, lo, hi, n_scan=2048):
    """Radii where the compensated power crosses its cap on [lo, hi]."""
    xs = np.linspace(lo + 1e-9, hi, n_scan)
    g = zeta_fn(xs) - zeta_star
    idx = np.nonzero(np.diff(np.sign(g)) != 0)[0]
    roots = []
    for i in idx:
        a, b = xs[i], xs[i + 1]
        fa = zeta_fn(a) - zeta_star
        for _ in range(60):
            mid = 0.5 * (a + b)
            fm = zeta_fn(mid) - zeta_star
            if (fa < 0) == (fm < 0):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    return roots


def _uav_serving_law(scn: Scenario, n_pts: int | None = None) -> _ServingLaw:
    n_pts = n_pts or scn.cfg.numerics.mixture_points_per_panel
    r_m = scn.u2u_dist.max_dist
    sat = [scn.uav_saturation_radius(c) for c in (Condition.LOS, Condition.NLOS)]
    edges = _merge_edges(scn.rings(max(r_m, 1.0)).breakpoints, sat, lo=0.0, hi=r_m)
    x, w = _panel_nodes(edges, n_pts)
    pdf = u2u_distance_pdf(x, scn.u2u_dist)
    p_l = scn.p_los(LinkClass.UU, x)
    weights = np.concatenate([w * pdf * p_l, w * pdf * (1.0 - p_l)])
    powers = np.concatenate(
        [scn.uav_tx_power(x, Condition.LOS), scn.uav_tx_power(x, Condition.NLOS)]
    )
    return _ServingLaw(np.concatenate([x, x]), weights, powers, weights.copy())


def _gue_serving_law(scn: Scenario, n_pts: int | None = None) -> _ServingLaw:
    if scn.lam_b <= 0.0:
        raise ConfigError(
            "ground-user law undefined without base stations", field="bs_density_per_km2"
        )
    n_pts = n_pts or scn.cfg.numerics.mixture_points_per_panel
    x_max = 6.0 * scn.sigma_g
    nulls = scn.bs_null_radii(scn.heights.h_g)
    crossings = []
    if scn.pc_g.epsilon > 0.0:
        zeta_star = (scn.pc_g.cap_mw / scn.pc_g.rho_mw) ** (1.0 / scn.pc_g.epsilon)
        for cond in (Condition.LOS, Condition.NLOS):
            crossings += _cap_crossings(
                lambda r, c=cond: scn.zeta(LinkClass.GB, c, r), zeta_star, 0.0, x_max
            )
    edges = _merge_edges(
        scn.rings(max(x_max, 1.0)).breakpoints, nulls, crossings, lo=0.0, hi=x_max
    )
    x, w = _panel_nodes(edges, n_pts)
    raw_radial = w * x * np.exp(-scn.lam_b * math.pi * x**2)
    p_l = scn.p_los(LinkClass.GB, x)
    raw = np.concatenate([raw_radial * p_l, raw_radial * (1.0 - p_l)])
    powers = np.concatenate(
        [scn.gue_tx_power(x, Condition.LOS), scn.gue_tx_power(x, Condition.NLOS)]
    )
    pdf_scale = 2.0 * math.pi * scn.lam_b
    return _ServingLaw(np.concatenate([x, x]), pdf_scale * raw, powers, raw)


def _fixed_power_law(power: float) -> _ServingLaw:
    one = np.asarray([1.0])
    return _ServingLaw(np.asarray([0.0]), one, np.asarray([float(power)]), one.copy())


# ---------------------------------------------------------------------------
# interference functionals
# ---------------------------------------------------------------------------


class _LogGrid:
    """Cubic interpolation of a sign-definite quantity in log-log space.

    Grid entries that underflowed to zero or to sign-flipped rounding
    noise (anything below 1e-9 of the grid maximum carrying the wrong
    sign) are dropped; evaluation clamps to the kept range, which only
    matters where the quantity is vanishing anyway.
    """

    def __init__(self, u, values):
        u = np.asarray(u, dtype=float)
        v = np.asarray(values, dtype=float)
        keep = np.isfinite(v) & (np.abs(v) > 0.0)
        if not np.any(keep):
            self.zero = True
            return
        self.zero = False
        peak = np.abs(v[keep]).max()
        dominant = np.sign(v[keep][np.argmax(np.abs(v[keep]))])
        wrong = keep & (np.sign(v) != dominant)
        if np.any(wrong & (np.abs(v) > 1e-9 * peak)):
            raise ToleranceError("functional changed sign on its grid; cannot log-interpolate")
        keep &= np.sign(v) == dominant
        self.sign = dominant
        lu = np.log(u[keep])
        self.spline = CubicSpline(lu, np.log(np.abs(v[keep])))
        self.lo = lu[0]
        self.hi = lu[-1]
        self.requested_lo = math.log(u[0])
        self.requested_hi = math.log(u[-1])

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.zero:
            return np.zeros_like(u)
        lu = np.log(u)
        if np.any((lu < self.requested_lo - 1e-9) | (lu > self.requested_hi + 1e-9)):
            raise ToleranceError("interpolation grid does not cover the requested range")
        with np.errstate(under="ignore"):
            return self.sign * np.exp(self.spline(np.clip(lu, self.lo, self.hi)))


class _MixtureFunctional:
    """I(t) = sum_k w_k RingSum(t P_k); derivatives chain through P_k."""

    def __init__(self, rings: _RingSums, law: _ServingLaw):
        self.rings = rings
        keep = law.weights > 0.0
        self.w = law.weights[keep]
        self.p = law.powers[keep]
        self._grids: dict[int, _LogGrid] = {}

    @property
    def degenerate(self) -> bool:
        return self.w.size == 0

    def direct(self, t, orders):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.degenerate:
            return {i: np.zeros_like(t) for i in orders}
        u = t[:, None] * self.p[None, :]
        sums = self.rings.sums(u, orders)
        return {i: (sums[i] * self.w * self.p**i).sum(axis=-1) for i in orders}

    def build_grids(self, t_lo, t_hi, per_decade, orders):
        if self.degenerate:
            self._grids = {i: None for i in orders}
            return
        u_lo = t_lo * self.p.min() / 2.0
        u_hi = t_hi * self.p.max() * 2.0
        n = max(60, int(per_decade * math.log10(u_hi / u_lo)) + 1)
        u = np.geomspace(u_lo, u_hi, n)
        sums = self.rings.sums(u, orders)
        self._grids = {i: _LogGrid(u, sums[i]) for i in orders}

    def gridded(self, t, orders):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.degenerate:
            return {i: np.zeros_like(t) for i in orders}
        u = t[:, None] * self.p[None, :]
        out = {}
        for i in orders:
            vals = self._grids[i](u.ravel()).reshape(u.shape)
            out[i] = (vals * self.w * self.p**i).sum(axis=-1)
        return out


class _ExclusionFunctional:
    """Ring sums that start at the interferer's own serving distance
    (co-channel ground users lie farther from the typical station than
    from their own)."""

    def __init__(self, rings: _RingSums, law: _ServingLaw):
        self.rings = rings
        keep = law.raw_weights > 0.0
        self.w = law.raw_weights[keep]
        self.p = law.powers[keep]
        self.x = law.x[keep]
        self.j = self.rings.ring_index(self.x)
        self.hi_edges = self.rings.edges[self.j + 1]
        self.p_host = self.rings.p[self.j]
        self._grids: dict[int, _LogGrid] = {}

    @property
    def degenerate(self) -> bool:
        return self.w.size == 0

    def _assemble(self, t, orders, tail_lookup):
        """Partial first annulus plus full tail; ``tail_lookup(i, u)``
        returns the tail sum starting at ring j+1 for each mixture node."""
        u = t[:, None] * self.p[None, :]
        psi_hi = self.rings.psi_at(u, self.hi_edges[None, :], self.j, orders)
        psi_x = self.rings.psi_at(u, self.x[None, :], self.j, orders)
        out = {}
        for i in orders:
            g = self.p_host * (psi_hi[i] - psi_x[i]) + tail_lookup(i, u)
            out[i] = (g * self.w * self.p**i).sum(axis=-1)
        return out

    def direct(self, t, orders):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.degenerate:
            return {i: np.zeros_like(t) for i in orders}
        u = t[:, None] * self.p[None, :]
        tails = self.rings.tail_sums(u, orders)
        cols = np.arange(self.p.size)

        def tail_lookup(i, _u):
            return tails[i][:, cols, self.j + 1]

        return self._assemble(t, orders, tail_lookup)

    def build_grids(self, t_lo, t_hi, per_decade, orders):
        if self.degenerate:
            self._grids = {i: None for i in orders}
            return
        t_grid = np.geomspace(t_lo / 2.0, t_hi * 2.0, max(60, int(per_decade * math.log10(4.0 * t_hi / t_lo)) + 1))
        u_lo = t_grid[0] * self.p.min()
        u_hi = t_grid[-1] * self.p.max()
        nu = max(60, int(per_decade * math.log10(u_hi / u_lo)) + 1)
        u_grid = np.geomspace(u_lo, u_hi, nu)
        tails = self.rings.tail_sums(u_grid, orders)
        tail_grids = {
            i: {int(j): _LogGrid(u_grid, tails[i][:, int(j) + 1]) for j in np.unique(self.j)}
            for i in orders
        }

        def tail_lookup(i, u):
            out = np.zeros_like(u)
            for j, g in tail_grids[i].items():
                mask = self.j == j
                out[:, mask] = g(u[:, mask].ravel()).reshape(u[:, mask].shape)
            return out

        vals = self._assemble(t_grid, orders, tail_lookup)
        self._grids = {i: _LogGrid(t_grid, vals[i]) for i in orders}

    def gridded(self, t, orders):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.degenerate:
            return {i: np.zeros_like(t) for i in orders}
        return {i: self._grids[i](t) for i in orders}


# ---------------------------------------------------------------------------
# public interference functionals
# ---------------------------------------------------------------------------


def interference_functional_uu_gu(
    s, side: LinkClass, cond_of_interferer: Condition, cfg: ScenarioConfig
):
    """Interference functional at the typical UAV receiver.

    ``side`` picks the interferer population: other UAV pairs (uu) or
    ground users (gu); ``cond_of_interferer`` is the condition of the
    interference link.
    """
    if side not in (LinkClass.UU, LinkClass.GU):
        raise DomainError("side must be uu or gu")
    scn = Scenario(cfg)
    rings = _ring_sums_for(scn, side, cond_of_interferer)
    law = _uav_serving_law(scn) if side is LinkClass.UU else _gue_serving_law(scn)
    out = _MixtureFunctional(rings, law).direct(np.atleast_1d(s).astype(float), orders=(0,))[0]
    return float(out[0]) if np.ndim(s) == 0 else out


def interference_functional_ug(s, cond: Condition, cfg: ScenarioConfig):
    """UAV interference functional at the typical station, with the
    array gain applied ring by ring."""
    scn = Scenario(cfg)
    rings = _ring_sums_for(scn, LinkClass.UB, cond)
    out = _MixtureFunctional(rings, _uav_serving_law(scn)).direct(
        np.atleast_1d(s).astype(float), orders=(0,)
    )[0]
    return float(out[0]) if np.ndim(s) == 0 else out


def interference_functional_gg(s, cond: Condition, cfg: ScenarioConfig):
    """Co-channel ground-user interference functional at the typical
    station, with the serving-distance exclusion."""
    scn = Scenario(cfg)
    rings = _ring_sums_for(scn, LinkClass.GB, cond)
    out = _ExclusionFunctional(rings, _gue_serving_law(scn)).direct(
        np.atleast_1d(s).astype(float), orders=(0,)
    )[0]
    return float(out[0]) if np.ndim(s) == 0 else out


# ---------------------------------------------------------------------------
# Laplace transforms of the aggregate interference
# ---------------------------------------------------------------------------


class InterferenceLaplacian:
    """exp(Lambda(s)) for one receiver type, with closed-form derivatives
    assembled from the per-class functionals."""

    def __init__(self, components, max_order: int):
        self.components = components  # list of (coefficient, functional)
        self.max_order = max_order
        self._use_grids = False

    def prepare(self, t_lo: float, t_hi: float, per_decade: int):
        orders = tuple(range(self.max_order + 1))
        for _, fn in self.components:
            fn.build_grids(t_lo, t_hi, per_decade, orders)
        self._use_grids = True
        return self

    def exponent_derivatives(self, t, orders=None):
        orders = tuple(range(self.max_order + 1)) if orders is None else tuple(orders)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = {i: np.zeros_like(t) for i in orders}
        for coef, fn in self.components:
            vals = fn.gridded(t, orders) if self._use_grids else fn.direct(t, orders)
            for i in orders:
                out[i] -= coef * vals[i]
        return out

    def derivatives(self, t, order: int):
        """Transform value and derivatives 0..order (product-rule
        recursion on exp(Lambda))."""
        lam = self.exponent_derivatives(t, orders=range(order + 1))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        with np.errstate(under="ignore"):
            devs = [np.exp(lam[0])]
            for i in range(1, order + 1):
                acc = np.zeros_like(t)
                for j in range(i):
                    acc += math.comb(i - 1, j) * lam[i - j] * devs[j]
                devs.append(acc)
        return devs

    def __call__(self, t):
        with np.errstate(under="ignore"):
            return np.exp(self.exponent_derivatives(t, orders=(0,))[0])


def _u2u_laplacian(scn: Scenario) -> InterferenceLaplacian:
    comps = []
    two_pi = 2.0 * math.pi
    if scn.lam_u_hat > 0.0:
        law = _uav_serving_law(scn)
        for cond in Condition:
            comps.append(
                (two_pi * scn.lam_u_hat,
                 _MixtureFunctional(_ring_sums_for(scn, LinkClass.UU, cond), law))
            )
    if scn.include_gue_on_uav and scn.lam_b > 0.0:
        law = _gue_serving_law(scn)
        for cond in Condition:
            comps.append(
                (two_pi * scn.lam_b,
                 _MixtureFunctional(_ring_sums_for(scn, LinkClass.GU, cond), law))
            )
    max_m = max(scn.table.m(LinkClass.UU, c) for c in Condition)
    return InterferenceLaplacian(comps, max_order=max_m - 1)


def _gue_laplacian(scn: Scenario) -> InterferenceLaplacian:
    if scn.lam_b <= 0.0:
        raise ConfigError(
            "uplink analysis needs a positive station density", field="bs_density_per_km2"
        )
    comps = []
    two_pi = 2.0 * math.pi
    if scn.uav_density_at_station > 0.0:
        law = _uav_serving_law(scn)
        for cond in Condition:
            comps.append(
                (two_pi * scn.uav_density_at_station,
                 _MixtureFunctional(_ring_sums_for(scn, LinkClass.UB, cond), law))
            )
    law_g = _gue_serving_law(scn)
    for cond in Condition:
        comps.append(
            ((two_pi * scn.lam_b) ** 2,
             _ExclusionFunctional(_ring_sums_for(scn, LinkClass.GB, cond), law_g))
        )
    max_m = max(scn.table.m(LinkClass.GB, c) for c in Condition)
    return InterferenceLaplacian(comps, max_order=max_m - 1)


def build_u2u_laplacian(cfg: ScenarioConfig, mode: SharingMode) -> InterferenceLaplacian:
    return _u2u_laplacian(Scenario(cfg, mode))


def build_gue_laplacian(cfg: ScenarioConfig, mode: SharingMode) -> InterferenceLaplacian:
    return _gue_laplacian(Scenario(cfg, mode))


def laplacian_u2u(s_u: float, mode: SharingMode, cfg: ScenarioConfig) -> LaplacianEvaluation:
    """Transform of the aggregate interference at the typical UAV receiver."""
    if s_u < 0.0:
        raise DomainError("transform argument must be non-negative")
    lap = build_u2u_laplacian(cfg, mode)
    devs = lap.derivatives(np.asarray([s_u], dtype=float), lap.max_order)
    return LaplacianEvaluation(value=float(devs[0][0]), derivatives=[float(d[0]) for d in devs])


def laplacian_gue(s_g: float, mode: SharingMode, cfg: ScenarioConfig) -> LaplacianEvaluation:
    """Transform of the aggregate interference at the typical station."""
    if s_g < 0.0:
        raise DomainError("transform argument must be non-negative")
    lap = build_gue_laplacian(cfg, mode)
    devs = lap.derivatives(np.asarray([s_g], dtype=float), lap.max_order)
    return LaplacianEvaluation(value=float(devs[0][0]), derivatives=[float(d[0]) for d in devs])


def laplacian_derivatives(lap: InterferenceLaplacian, s, order: int):
    """Derivatives 0..order of the transform at s."""
    if order > lap.max_order:
        raise DomainError(
            f"derivative order {order} exceeds the available fading order ({lap.max_order})"
        )
    devs = lap.derivatives(np.asarray([s], dtype=float).ravel(), order)
    return [float(d[0]) for d in devs]


# ---------------------------------------------------------------------------
# coverage assembly
# ---------------------------------------------------------------------------


def _q_weighted_sum(m: int, t, noise, transform_devs):
    """Conditional coverage from the transform derivatives. The noise
    polynomial weights pair with the alternating derivative signs, so
    every term is non-negative and the sum is cancellation-free."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        damp = np.exp(-noise * t)
        for i in range(m):
            q = np.zeros_like(t)
            for j in range(i, m):
                q += noise ** (j - i) * t**j / math.factorial(j - i)
            q *= damp / math.factorial(i)
            total += (-1.0) ** i * q * transform_devs[i]
    return np.nan_to_num(total, nan=0.0, posinf=1.0, neginf=0.0)


def _serving_panels(scn: Scenario, hi: float, with_bs_pattern: bool, extra=()):
    groups = [scn.rings(max(hi, 1.0)).breakpoints, list(extra)]
    if with_bs_pattern:
        groups.append(scn.bs_null_radii(scn.heights.h_g))
    edges = _merge_edges(*groups, lo=0.0, hi=hi)
    return _panel_nodes(edges, scn.cfg.numerics.serving_points_per_panel)


def _thresholds_linear(thresholds_db):
    t = np.asarray(thresholds_db, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("need a one-dimensional, non-empty threshold grid")
    return 10.0 ** (t / 10.0)


def _integrate_coverage(scn, lap, branches, t_lin, interpolate):
    all_s = np.concatenate([b[3].ravel() for b in branches])
    if interpolate and lap.components:
        lap.prepare(all_s.min(), all_s.max(), scn.cfg.numerics.grid_points_per_decade)
    coverage = np.zeros_like(t_lin)
    for _cond, m, weight, s in branches:
        devs = lap.derivatives(s.ravel(), m - 1)
        cond_cov = _q_weighted_sum(m, s.ravel(), scn.noise_mw, devs).reshape(s.shape)
        coverage += weight @ np.clip(cond_cov, 0.0, 1.0)
    return coverage


def coverage_u2u_exact(
    cfg: ScenarioConfig,
    mode: SharingMode,
    thresholds_db,
    interpolate: bool = True,
) -> CoverageCurve:
    """Coverage probability of the typical UAV pair link."""
    scn = Scenario(cfg, mode)
    t_lin = _thresholds_linear(thresholds_db)
    sat = [scn.uav_saturation_radius(c) for c in Condition]
    r, w = _serving_panels(scn, scn.u2u_dist.max_dist, with_bs_pattern=False, extra=sat)
    pdf = u2u_distance_pdf(r, scn.u2u_dist)
    p_l = scn.p_los(LinkClass.UU, r)

    lap = _u2u_laplacian(scn)
    branches = []
    for cond, p_cond in ((Condition.LOS, p_l), (Condition.NLOS, 1.0 - p_l)):
        m = scn.table.m(LinkClass.UU, cond)
        zeta = scn.zeta(LinkClass.UU, cond, r)
        power = scn.uav_tx_power(r, cond)
        s = m * np.outer(zeta / power, t_lin)
        branches.append((cond, m, w * pdf * p_cond, s))
    coverage = _integrate_coverage(scn, lap, branches, t_lin, interpolate)
    return CoverageCurve(np.asarray(thresholds_db, dtype=float), coverage)


def coverage_gue_exact(
    cfg: ScenarioConfig,
    mode: SharingMode,
    thresholds_db,
    interpolate: bool = True,
) -> CoverageCurve:
    """Uplink coverage probability of the typical ground user."""
    scn = Scenario(cfg, mode)
    if scn.lam_b <= 0.0:
        raise ConfigError(
            "uplink coverage needs a positive station density", field="bs_density_per_km2"
        )
    t_lin = _thresholds_linear(thresholds_db)
    r, w = _serving_panels(scn, 6.0 * scn.sigma_g, with_bs_pattern=True)
    pdf = 2.0 * math.pi * scn.lam_b * r * np.exp(-scn.lam_b * math.pi * r**2)
    p_l = scn.p_los(LinkClass.GB, r)

    lap = _gue_laplacian(scn)
    branches = []
    for cond, p_cond in ((Condition.LOS, p_l), (Condition.NLOS, 1.0 - p_l)):
        m = scn.table.m(LinkClass.GB, cond)
        zeta = scn.zeta(LinkClass.GB, cond, r)
        power = scn.gue_tx_power(r, cond)
        s = m * np.outer(zeta / power, t_lin)
        branches.append((cond, m, w * pdf * p_cond, s))
    coverage = _integrate_coverage(scn, lap, branches, t_lin, interpolate)
    return CoverageCurve(np.asarray(thresholds_db, dtype=float), coverage)
