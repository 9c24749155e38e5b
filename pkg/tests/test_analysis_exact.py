import math

import numpy as np
import pytest
from scipy import integrate, stats

from u2ucell.analysis_exact import (
    _ExclusionFunctional,
    _MixtureFunctional,
    _RingSums,
    _gue_serving_law,
    _ring_sums_for,
    _uav_serving_law,
    build_gue_laplacian,
    build_u2u_laplacian,
    coverage_gue_exact,
    coverage_u2u_exact,
    interference_functional_gg,
    interference_functional_ug,
    interference_functional_uu_gu,
    laplacian_derivatives,
    laplacian_gue,
    laplacian_u2u,
    psi_kernel,
)
from u2ucell.channel import Condition, LinkClass, nakagami_ccdf, u2u_distance_pdf
from u2ucell.config import ScenarioConfig
from u2ucell.curves import SharingMode
from u2ucell.errors import DomainError
from u2ucell.scenario import Scenario

from conftest import gl_nodes


def psi_diff_oracle(s, power, m, alpha, h, r_lo, r_hi, n=240):
    """2-D Gauss-Legendre quadrature over radius and the unit-mean Gamma
    fading density of the incomplete ring integral."""
    g = stats.gamma(a=m, scale=1.0 / m)
    psi, wp = gl_nodes(0.0, g.ppf(1.0 - 1e-15), n)
    r, wr = gl_nodes(r_lo, r_hi, n)
    w = s * power * (r * r + h * h) ** (-alpha / 2.0)
    inner = (-np.expm1(-np.outer(psi, w)) * r) @ wr
    return float((inner * g.pdf(psi)) @ wp)


def gl_panels(edges, n):
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gl_nodes(lo, hi, n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def ring_aligned_panels(scn, lo, hi, n, extra=()):
    """Quadrature nodes split at the blockage rings (and any extra
    breakpoints) so the integrand stays smooth inside each panel."""
    edges = [e for e in scn.rings(max(hi, 1.0)).breakpoints if lo < e < hi]
    edges += [e for e in extra if lo < e < hi]
    return gl_panels(np.asarray([lo] + sorted(set(edges)) + [hi]), n)


def gue_power_kinks(scn, lo, hi, n_scan=4096):
    """Radii where the ground-user compensated power hits its budget
    (the pattern nulls make several crossings); panel splits for the
    serving-distance quadrature."""
    xs = np.linspace(lo + 1e-6, hi, n_scan)
    out = []
    for cond in Condition:
        gap = np.asarray(scn.gue_tx_power(xs, cond)) - scn.pc_g.cap_mw
        for i in np.nonzero(np.diff(np.sign(gap)) != 0)[0]:
            a, b = xs[i], xs[i + 1]
            for _ in range(50):
                mid = 0.5 * (a + b)
                if (float(scn.gue_tx_power(a, cond)) - scn.pc_g.cap_mw < 0) == (
                    float(scn.gue_tx_power(mid, cond)) - scn.pc_g.cap_mw < 0
                ):
                    a = mid
                else:
                    b = mid
            out.append(0.5 * (a + b))
    return out


def gue_serving_panels(scn, n):
    hi = 6.0 * scn.sigma_g
    extra = list(scn.bs_null_radii(scn.heights.h_g)) + gue_power_kinks(scn, 0.0, hi)
    return ring_aligned_panels(scn, 0.0, hi, n, extra=extra)


def ring_oracle(
    scn, cls, cond, s_rx, power, trunc, gain_fn=None, from_radius=None, n=32, extra_edges=()
):
    """Brute-force occupation-weighted ring integral with the exact
    fading expectation; log-refined near the origin for same-height
    links (the singular path loss concentrates mass there)."""
    base = list(scn.rings(trunc).breakpoints)
    h = scn.height_diff(cls)
    edges = set(base) | {e for e in extra_edges if 0.0 < e < trunc}
    if h == 0.0:
        edges |= set(np.geomspace(1e-4, base[1], 40))
    if from_radius is not None:
        edges = {e for e in edges if e > from_radius} | {from_radius}
    r, w = gl_panels(np.asarray(sorted(edges)), n)
    p = scn.p_los(cls, r)
    if cond is Condition.NLOS:
        p = 1.0 - p
    tau = scn.table.ref_linear(cls, cond)
    alpha = scn.table.alpha(cls, cond)
    m = scn.table.m(cls, cond)
    gain = gain_fn(r) if gain_fn is not None else 1.0
    mu = s_rx * gain / tau * power * (r * r + h * h) ** (-alpha / 2.0)
    return float(np.sum(p * (-np.expm1(-m * np.log1p(mu / m))) * r * w))


class TestPsiKernel:
    def test_zero_argument(self):
        assert psi_kernel(0.0, 100.0, 50.0, 3, 2.5, 1.0) == 0.0

    def test_ring_differences_match_quadrature(self, rng):
        for _ in range(10):
            m = int(rng.integers(1, 6))
            alpha = float(rng.uniform(2.05, 4.6))
            h = float(rng.choice([0.0, 23.5, 75.0, 98.5]))
            s = 10.0 ** rng.uniform(-7, -2)
            power = 10.0 ** rng.uniform(-3, 0.7)
            r_lo, r_hi = np.sort(rng.uniform(0.0, 600.0, size=2))
            ref = psi_diff_oracle(s, power, m, alpha, h, r_lo, r_hi)
            got = psi_kernel(s, r_hi, h, m, alpha, power) - psi_kernel(
                s, r_lo, h, m, alpha, power
            )
            assert got == pytest.approx(ref, rel=1e-6)

    def test_rayleigh_flat_ring(self):
        # m = 1, h = 0: the fading expectation is elementary
        s, power, alpha = 3e-4, 0.4, 2.6
        r_lo, r_hi = 120.0, 900.0

        def integrand(r):
            mu = s * power * r ** (-alpha)
            return (1.0 - 1.0 / (1.0 + mu)) * r

        ref, _ = integrate.quad(integrand, r_lo, r_hi, limit=300, epsabs=0.0, epsrel=1e-11)
        got = psi_kernel(s, r_hi, 0.0, 1, alpha, power) - psi_kernel(
            s, r_lo, 0.0, 1, alpha, power
        )
        assert got == pytest.approx(ref, rel=1e-9)

    def test_origin_limit(self):
        # closed-form half-line integral at zero height
        import mpmath

        mpmath.mp.dps = 30
        for s, power, m, alpha in [(2e-4, 0.5, 3, 2.5), (1e-3, 2.0, 5, 2.2)]:
            beta = 2.0 / alpha
            c0 = (
                mpmath.gamma(1 - beta)
                * mpmath.gamma(m + beta)
                / (2 * mpmath.gamma(m) * mpmath.mpf(m) ** beta)
            )
            ref = float(-((mpmath.mpf(s) * power) ** beta) * c0)
            assert psi_kernel(s, 0.0, 0.0, m, alpha, power) == pytest.approx(ref, rel=1e-12)

    def test_alpha_two_rejected(self):
        with pytest.raises(DomainError):
            psi_kernel(1e-4, 100.0, 0.0, 1, 2.0, 1.0)

    def test_domain(self):
        with pytest.raises(DomainError):
            psi_kernel(-1.0, 100.0, 0.0, 1, 2.5, 1.0)
        with pytest.raises(DomainError):
            psi_kernel(1.0, -1.0, 0.0, 1, 2.5, 1.0)


def all_los_config():
    """Tiny obstacle scale makes every link line-of-sight."""
    cfg = ScenarioConfig()
    cfg.los.a3 = 1e-9
    cfg.numerics.ring_truncation_m = 2000.0
    return cfg


class TestInterferenceFunctionals:
    def test_zero_argument(self, fast_cfg):
        for cond in Condition:
            assert interference_functional_uu_gu(0.0, LinkClass.UU, cond, fast_cfg) == 0.0
            assert interference_functional_ug(0.0, cond, fast_cfg) == 0.0
            assert interference_functional_gg(0.0, cond, fast_cfg) == 0.0

    def test_all_los_collapse(self):
        # with certain line-of-sight and no power variation the ring sum
        # telescopes into one kernel difference
        cfg = all_los_config()
        cfg.uav_power.epsilon = 0.0
        scn = Scenario(cfg)
        s = 1e-5
        got = interference_functional_uu_gu(s, LinkClass.UU, Condition.LOS, cfg)
        power = min(scn.pc_u.cap_mw, scn.pc_u.rho_mw)
        tau = scn.table.ref_linear(LinkClass.UU, Condition.LOS)
        alpha = scn.table.alpha(LinkClass.UU, Condition.LOS)
        m = scn.table.m(LinkClass.UU, Condition.LOS)
        ref = psi_kernel(s / tau, 2000.0, 0.0, m, alpha, power) - psi_kernel(
            s / tau, 0.0, 0.0, m, alpha, power
        )
        assert got == pytest.approx(ref, rel=1e-9)
        assert interference_functional_uu_gu(s, LinkClass.UU, Condition.NLOS, cfg) == 0.0

    def test_uu_against_nested_quadrature(self, fast_cfg):
        scn = Scenario(fast_cfg)
        trunc = fast_cfg.numerics.ring_truncation_m
        for s, cond in ((1e9, Condition.LOS), (3e9, Condition.NLOS)):
            ref = 0.0
            x, wx = ring_aligned_panels(scn, 0.0, scn.u2u_dist.max_dist, 20)
            for xk, wk in zip(x, wx):
                p_l = float(scn.p_los(LinkClass.UU, xk))
                pdf = float(u2u_distance_pdf(xk, scn.u2u_dist))
                val = p_l * ring_oracle(
                    scn, LinkClass.UU, cond, s, float(scn.uav_tx_power(xk, Condition.LOS)), trunc
                ) + (1.0 - p_l) * ring_oracle(
                    scn, LinkClass.UU, cond, s, float(scn.uav_tx_power(xk, Condition.NLOS)), trunc
                )
                ref += wk * pdf * val
            got = interference_functional_uu_gu(s, LinkClass.UU, cond, fast_cfg)
            assert got == pytest.approx(ref, rel=1e-4)

    def test_gu_against_nested_quadrature(self, fast_cfg):
        scn = Scenario(fast_cfg)
        trunc = fast_cfg.numerics.ring_truncation_m
        for s, cond in ((1e9, Condition.NLOS), (1e8, Condition.LOS)):
            ref = 0.0
            x, wx = gue_serving_panels(scn, 24)
            for xk, wk in zip(x, wx):
                p_l = float(scn.p_los(LinkClass.GB, xk))
                pdf = 2.0 * math.pi * scn.lam_b * xk * math.exp(-scn.lam_b * math.pi * xk * xk)
                val = p_l * ring_oracle(
                    scn, LinkClass.GU, cond, s, float(scn.gue_tx_power(xk, Condition.LOS)), trunc
                ) + (1.0 - p_l) * ring_oracle(
                    scn, LinkClass.GU, cond, s, float(scn.gue_tx_power(xk, Condition.NLOS)), trunc
                )
                ref += wk * pdf * val
            got = interference_functional_uu_gu(s, LinkClass.GU, cond, fast_cfg)
            assert got == pytest.approx(ref, rel=1e-4)

    def test_ug_station_gain_structure(self, fast_cfg):
        # per-ring gains against an equivalent uniform-gain ring sum built
        # directly: forcing unit gain reduces to the uu-form machinery
        scn = Scenario(fast_cfg)
        rings = _ring_sums_for(scn, LinkClass.UB, Condition.LOS)
        uniform = _RingSums(
            rings.edges,
            rings.p,
            1.0 / scn.table.ref_linear(LinkClass.UB, Condition.LOS),
            rings.h,
            rings.m,
            rings.alpha,
        )
        forced = _RingSums(
            rings.edges,
            rings.p,
            np.full(len(rings.p), 1.0 / scn.table.ref_linear(LinkClass.UB, Condition.LOS)),
            rings.h,
            rings.m,
            rings.alpha,
        )
        u = np.array([1e-4, 1e-2])
        a = uniform.sums(u, (0, 1))
        b = forced.sums(u, (0, 1))
        for i in (0, 1):
            np.testing.assert_allclose(a[i], b[i], rtol=1e-12)

    def test_ug_against_continuous_gain_quadrature(self, fast_cfg):
        # the per-annulus constant-gain treatment against a continuous-gain
        # reference; discrepancy shrinks with the refinement step
        cfg = fast_cfg.copy()
        cfg.numerics.gain_refine_max_dcos = 0.004
        cfg.numerics.ring_truncation_m = 2000.0
        scn = Scenario(cfg)
        s = 1e9
        cond = Condition.LOS
        gain_fn = lambda r: scn.bs_gain(scn.heights.h_u, r)
        ref = 0.0
        x, wx = ring_aligned_panels(scn, 0.0, scn.u2u_dist.max_dist, 16)
        for xk, wk in zip(x, wx):
            p_l = float(scn.p_los(LinkClass.UU, xk))
            pdf = float(u2u_distance_pdf(xk, scn.u2u_dist))
            nulls = scn.bs_null_radii(scn.heights.h_u)
            val = p_l * ring_oracle(
                scn, LinkClass.UB, cond, s, float(scn.uav_tx_power(xk, Condition.LOS)),
                2000.0, gain_fn=gain_fn, extra_edges=nulls,
            ) + (1.0 - p_l) * ring_oracle(
                scn, LinkClass.UB, cond, s, float(scn.uav_tx_power(xk, Condition.NLOS)),
                2000.0, gain_fn=gain_fn, extra_edges=nulls,
            )
            ref += wk * pdf * val
        got = interference_functional_ug(s, cond, cfg)
        assert got == pytest.approx(ref, rel=3e-4)

    @staticmethod
    def _gg_oracle(cfg, s, cond, gain_fn, n_outer=24):
        scn = Scenario(cfg)
        trunc = cfg.numerics.ring_truncation_m
        ref = 0.0
        x, wx = gue_serving_panels(scn, n_outer)
        for xk, wk in zip(x, wx):
            p_l = float(scn.p_los(LinkClass.GB, xk))
            weight = xk * math.exp(-scn.lam_b * math.pi * xk * xk)
            val = p_l * ring_oracle(
                scn, LinkClass.GB, cond, s, float(scn.gue_tx_power(xk, Condition.LOS)),
                trunc, gain_fn=gain_fn, from_radius=xk,
            ) + (1.0 - p_l) * ring_oracle(
                scn, LinkClass.GB, cond, s, float(scn.gue_tx_power(xk, Condition.NLOS)),
                trunc, gain_fn=gain_fn, from_radius=xk,
            )
            ref += wk * weight * val
        return ref

    def test_gg_against_staircase_quadrature(self, fast_cfg):
        # the ring-sum machinery against nested quadrature under the same
        # per-annulus constant-gain treatment
        from u2ucell.analysis_exact import _refined_edges

        cfg = fast_cfg.copy()
        cfg.numerics.ring_truncation_m = 2000.0
        cfg.numerics.mixture_points_per_panel = 10
        scn = Scenario(cfg)
        s = 1e9
        cond = Condition.NLOS
        edges = _refined_edges(scn, scn.rings(2000.0).breakpoints, scn.heights.h_g)
        mids = 0.5 * (edges[:-1] + edges[1:])
        gains = scn.bs_gain(scn.heights.h_g, mids)

        def staircase(r):
            idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, len(gains) - 1)
            return gains[idx]

        ref = self._gg_oracle(cfg, s, cond, staircase)
        got = interference_functional_gg(s, cond, cfg)
        assert got == pytest.approx(ref, rel=1e-4)

    def test_gg_staircase_converges_to_continuous(self, fast_cfg):
        # the constant-gain annuli tend to the continuous pattern as the
        # refinement step shrinks
        s = 1e9
        cond = Condition.NLOS
        cfg0 = fast_cfg.copy()
        cfg0.numerics.ring_truncation_m = 2000.0
        scn0 = Scenario(cfg0)
        continuous = self._gg_oracle(
            cfg0, s, cond, lambda r: scn0.bs_gain(scn0.heights.h_g, r)
        )
        gaps = []
        for dcos in (0.03, 0.004):
            cfg = cfg0.copy()
            cfg.numerics.gain_refine_max_dcos = dcos
            cfg.numerics.mixture_points_per_panel = 16
            got = interference_functional_gg(s, cond, cfg)
            gaps.append(abs(got - continuous) / continuous)
        assert gaps[1] < gaps[0]
        assert gaps[1] < 2e-3

    def test_gg_vanishes_with_station_density(self, fast_cfg):
        cfg = fast_cfg.copy()
        cfg.bs_density_per_km2 = 0.01
        lam = cfg.bs_density_per_km2 * 1e-6
        val = interference_functional_gg(1e-3, Condition.NLOS, cfg)
        exponent = (2.0 * math.pi * lam) ** 2 * val
        assert math.exp(-exponent) == pytest.approx(1.0, abs=1e-4)


class TestRingArrangements:
    def test_difference_of_p_equivalence(self, rng):
        """The two algebraic arrangements of the ring sum agree once the
        truncation tail term is accounted for."""
        for _ in range(6):
            m = int(rng.integers(1, 6))
            alpha = float(rng.uniform(2.1, 4.5))
            h = float(rng.choice([0.0, 75.0]))
            edges = np.concatenate([[0.0], np.sort(rng.uniform(10.0, 3000.0, size=25))])
            p = rng.uniform(0.0, 1.0, size=edges.size - 1)
            gamma = 10.0 ** rng.uniform(-4, -2)
            u = 10.0 ** rng.uniform(-1, 3)
            rings = _RingSums(edges, p, gamma, h, m, alpha)
            got = float(rings.sums(np.array([u]), (0,))[0][0])
            # difference-of-occupation arrangement plus boundary tail
            psi = [
                float(psi_kernel(u * gamma, r, h, m, alpha, 1.0)) for r in edges
            ]
            p_ext = np.concatenate([[0.0], p])
            alt = sum(
                (p_ext[i] - p_ext[i + 1]) * psi[i]
                for i in range(0, len(edges) - 1)
            )
            alt += p[-1] * psi[-1]  # truncation boundary term
            assert got == pytest.approx(alt, rel=1e-9)


class TestLaplacians:
    def test_value_one_at_zero(self, fast_cfg, underlay):
        assert laplacian_u2u(0.0, underlay, fast_cfg).value == 1.0
        assert laplacian_gue(0.0, underlay, fast_cfg).value == 1.0

    def test_no_interferers(self, fast_cfg, underlay):
        cfg = fast_cfg.copy()
        cfg.uav_density_per_km2 = 0.0
        cfg.bs_density_per_km2 = 0.0
        for s in (0.0, 1e6, 1e12):
            assert laplacian_u2u(s, underlay, cfg).value == 1.0

    def test_monotone_decreasing(self, fast_cfg, underlay):
        lap = build_u2u_laplacian(fast_cfg, underlay)
        s = np.geomspace(1e6, 1e12, 13)
        values = lap(s)
        assert np.all(np.diff(values) < 0.0)
        assert np.all((values > 0.0) & (values <= 1.0))

    def test_overlay_above_underlay_for_uplink(self, fast_cfg):
        cfg = fast_cfg.copy()
        cfg.eta_u = 0.5
        over = build_gue_laplacian(cfg, SharingMode.overlay(0.5))
        under = build_gue_laplacian(cfg, SharingMode.underlay(0.5))
        s = np.geomspace(1e7, 1e11, 7)
        assert np.all(over(s) >= under(s))

    def test_derivatives_match_finite_differences(self, fast_cfg, underlay):
        lap_u = build_u2u_laplacian(fast_cfg, underlay)
        lap_g = build_gue_laplacian(fast_cfg, underlay)
        step = (2.0 * np.finfo(float).eps) ** (1.0 / 3.0)
        for lap, orders in ((lap_u, 4), (lap_g, 2)):
            for s in (1e7, 1e9, 3e10):
                devs = lap.derivatives(np.array([s]), orders)
                for i in range(1, orders + 1):
                    h = s * step
                    lo = lap.derivatives(np.array([s - h]), i - 1)[i - 1][0]
                    hi = lap.derivatives(np.array([s + h]), i - 1)[i - 1][0]
                    fd = (hi - lo) / (2.0 * h)
                    assert devs[i][0] == pytest.approx(fd, rel=1e-4)

    def test_sign_pattern(self, fast_cfg, underlay):
        lap = build_u2u_laplacian(fast_cfg, underlay)
        for s in np.geomspace(1e6, 1e12, 7):
            devs = lap.derivatives(np.array([s]), 4)
            for i, d in enumerate(devs):
                assert (-1.0) ** i * d[0] >= 0.0

    def test_order_limit(self, fast_cfg, underlay):
        lap = build_u2u_laplacian(fast_cfg, underlay)
        assert len(laplacian_derivatives(lap, 1e9, 4)) == 5
        with pytest.raises(DomainError):
            laplacian_derivatives(lap, 1e9, 5)

    def test_gue_laplacian_against_simulation(self, fast_cfg, underlay):
        from u2ucell.montecarlo import simulate_gue

        samples = simulate_gue(fast_cfg, underlay, 4000, seed=3)
        interference = np.array(
            [s.interference_uav + s.interference_gue for s in samples]
        )
        s_probe = 0.3 / interference.mean()
        emp = np.exp(-s_probe * interference)
        lap = build_gue_laplacian(fast_cfg, underlay)
        got = float(lap(np.array([s_probe]))[0])
        se = emp.std() / math.sqrt(len(emp))
        assert abs(got - emp.mean()) <= 2.0 * se


class TestCoverageExact:
    def test_low_threshold_limit(self, fast_cfg, underlay):
        curve = coverage_u2u_exact(fast_cfg, underlay, np.array([-60.0]))
        assert curve.coverage[0] == pytest.approx(1.0, abs=1e-3)
        curve_g = coverage_gue_exact(fast_cfg, underlay, np.array([-60.0]))
        assert curve_g.coverage[0] == pytest.approx(1.0, abs=1e-3)

    def test_noise_only_closed_form(self, fast_cfg, underlay):
        cfg = fast_cfg.copy()
        cfg.uav_density_per_km2 = 0.0
        cfg.bs_density_per_km2 = 0.0
        thr = np.array([-10.0, 0.0, 10.0, 20.0])
        got = coverage_u2u_exact(cfg, underlay, thr)
        scn = Scenario(cfg, underlay)

        def closed_form(t_lin):
            def f(r):
                p_l = scn.p_los(LinkClass.UU, r)
                total = 0.0
                for p_cond, cond in ((p_l, Condition.LOS), (1.0 - p_l, Condition.NLOS)):
                    m = scn.table.m(LinkClass.UU, cond)
                    zeta = float(scn.zeta(LinkClass.UU, cond, r))
                    p_tx = float(scn.uav_tx_power(r, cond))
                    omega = t_lin * scn.noise_mw * zeta / p_tx
                    total += p_cond * nakagami_ccdf(omega, m)
                return total * u2u_distance_pdf(r, scn.u2u_dist)

            val = 0.0
            for lo, hi in zip([0.0, 150.0], [150.0, 500.0]):
                v, _ = integrate.quad(f, lo, hi, limit=80)
                val += v
            return val

        ref = np.array([closed_form(10.0 ** (t / 10.0)) for t in thr])
        np.testing.assert_allclose(got.coverage, ref, atol=2e-6)

    @staticmethod
    def _tiny_cfg(fast_cfg):
        cfg = fast_cfg.copy()
        cfg.numerics.ring_truncation_m = 1500.0
        cfg.numerics.serving_points_per_panel = 4
        cfg.numerics.mixture_points_per_panel = 4
        return cfg

    def test_interpolated_matches_direct(self, fast_cfg, underlay):
        cfg = self._tiny_cfg(fast_cfg)
        thr = np.array([-6.0, 4.0, 14.0])
        fast = coverage_u2u_exact(cfg, underlay, thr, interpolate=True)
        slow = coverage_u2u_exact(cfg, underlay, thr, interpolate=False)
        np.testing.assert_allclose(fast.coverage, slow.coverage, atol=2e-5)

    def test_gue_interpolated_matches_direct(self, fast_cfg, underlay):
        cfg = self._tiny_cfg(fast_cfg)
        thr = np.array([-4.0, 6.0])
        fast = coverage_gue_exact(cfg, underlay, thr, interpolate=True)
        slow = coverage_gue_exact(cfg, underlay, thr, interpolate=False)
        np.testing.assert_allclose(fast.coverage, slow.coverage, atol=2e-5)

    def test_monotone_and_bounded(self, fast_cfg, underlay):
        thr = np.arange(-10.0, 31.0, 4.0)
        for fn in (coverage_u2u_exact, coverage_gue_exact):
            c = fn(fast_cfg, underlay, thr).coverage
            assert np.all(np.diff(c) <= 1e-12)
            assert np.all((c >= 0.0) & (c <= 1.0))

    def test_overlay_identity_u2u(self, fast_cfg):
        """Overlay equals the underlay evaluator with the station density
        zeroed and the interferer density matched."""
        eta = 0.3
        cfg = fast_cfg.copy()
        cfg.eta_u = eta
        cfg.mode = "overlay"
        thr = np.array([-5.0, 5.0, 15.0])
        over = coverage_u2u_exact(cfg, SharingMode.overlay(eta), thr)
        cfg_u = cfg.copy()
        cfg_u.mode = "underlay"
        cfg_u.bs_density_per_km2 = 0.0
        cfg_u.uav_density_per_km2 = cfg.uav_density_per_km2 / eta
        under = coverage_u2u_exact(cfg_u, SharingMode.underlay(eta), thr)
        np.testing.assert_allclose(over.coverage, under.coverage, atol=1e-12)

    def test_overlay_identity_gue(self, fast_cfg):
        eta = 0.3
        cfg = fast_cfg.copy()
        cfg.eta_u = eta
        cfg.mode = "overlay"
        thr = np.array([-5.0, 5.0])
        over = coverage_gue_exact(cfg, SharingMode.overlay(eta), thr)
        cfg_u = cfg.copy()
        cfg_u.mode = "underlay"
        cfg_u.uav_density_per_km2 = 0.0
        # match the per-block budget of the narrower overlay allocation
        cfg_u.gue_power.p_max_dbm += 10.0 * math.log10(1.0 / (1.0 - eta))
        under = coverage_gue_exact(cfg_u, SharingMode.underlay(eta), thr)
        np.testing.assert_allclose(over.coverage, under.coverage, atol=1e-12)

    def test_coverage_decreases_with_density(self, fast_cfg):
        thr = np.array([0.0])
        values_u = []
        values_b = []
        for lam in (0.5, 2.0, 8.0):
            cfg = fast_cfg.copy()
            cfg.uav_density_per_km2 = lam
            values_u.append(
                coverage_u2u_exact(cfg, SharingMode.underlay(1.0), thr).coverage[0]
            )
            cfg2 = fast_cfg.copy()
            cfg2.bs_density_per_km2 = lam
            values_b.append(
                coverage_u2u_exact(cfg2, SharingMode.underlay(1.0), thr).coverage[0]
            )
        assert values_u[0] >= values_u[1] >= values_u[2]
        assert values_b[0] >= values_b[1] >= values_b[2]
