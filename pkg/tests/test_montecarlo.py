import math

import numpy as np
import pytest
from scipy import stats

from u2ucell.channel import Condition, LinkClass, nakagami_ccdf, u2u_distance_pdf
from u2ucell.config import ScenarioConfig
from u2ucell.curves import CoverageCurve, SharingMode
from u2ucell.errors import DomainError
from u2ucell.montecarlo import (
    ccdf_from_samples,
    draw_gue_snapshot,
    draw_u2u_snapshot,
    rate_ccdf,
    sample_ppp_disc,
    simulate_gue,
    simulate_u2u,
)
from u2ucell.power import mean_uav_power
from u2ucell.scenario import Scenario


class TestPpp:
    def test_zero_density(self, rng):
        assert sample_ppp_disc(0.0, 1000.0, rng).shape == (0, 2)

    def test_mean_count(self, rng):
        lam, radius = 3e-5, 800.0
        counts = [len(sample_ppp_disc(lam, radius, rng)) for _ in range(2000)]
        mean = lam * math.pi * radius**2
        assert abs(np.mean(counts) - mean) < 4.0 * math.sqrt(mean / 2000)

    def test_uniform_radial_law(self, rng):
        pts = sample_ppp_disc(2e-4, 500.0, rng)
        r = np.hypot(pts[:, 0], pts[:, 1])
        res = stats.kstest(r / 500.0, lambda x: x**2)
        assert res.pvalue > 0.01

    def test_domain(self, rng):
        with pytest.raises(DomainError):
            sample_ppp_disc(-1.0, 10.0, rng)
        with pytest.raises(DomainError):
            sample_ppp_disc(1.0, 0.0, rng)


class TestCcdfMath:
    def test_single_sample(self):
        from u2ucell.montecarlo import SinrSample

        s = SinrSample(1.0, 1.0, 0.0, 0.0, 1e-12)
        curve = ccdf_from_samples([s], np.array([-10.0]))
        assert curve.coverage[0] == 1.0

    def test_threshold_above_everything(self, rng):
        sinr = 10.0 ** rng.uniform(-1, 1, size=500)
        curve = ccdf_from_samples(sinr, np.array([50.0]))
        assert curve.coverage[0] == 0.0

    def test_binomial_stderr(self, rng):
        sinr = 10.0 ** rng.uniform(-1, 1, size=400)
        curve = ccdf_from_samples(sinr, np.array([0.0]))
        p = curve.coverage[0]
        assert curve.stderr[0] == pytest.approx(math.sqrt(p * (1 - p) / 400))

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            ccdf_from_samples(np.array([]), np.array([0.0]))


class TestRateCcdf:
    def test_zero_rate_threshold(self, rng):
        sinr = 10.0 ** rng.uniform(-2, 2, size=300)
        curve = rate_ccdf(sinr, 1e6, np.array([1e-9, 1e3]))
        assert curve.coverage[0] == 1.0

    def test_wider_band_lowers_required_sinr(self):
        t = 1e6
        thr_narrow = 2.0 ** (t / 1e6) - 1.0
        thr_wide = 2.0 ** (t / 2e6) - 1.0
        assert thr_wide < thr_narrow

    def test_curve_input_interpolates(self):
        curve = CoverageCurve(np.array([-20.0, 0.0, 20.0]), np.array([1.0, 0.5, 0.0]))
        rate = rate_ccdf(curve, 1e6, np.array([1e3, 1e6, 5e6]))
        assert rate.coverage[0] > rate.coverage[1] > rate.coverage[2]

    def test_domain(self, rng):
        with pytest.raises(DomainError):
            rate_ccdf(10.0 ** rng.uniform(0, 1, 10), 0.0, np.array([1e3]))


class TestDeterminism:
    def test_same_seed_same_samples(self, fast_cfg, underlay):
        a = simulate_u2u(fast_cfg, underlay, 40, seed=9)
        b = simulate_u2u(fast_cfg, underlay, 40, seed=9)
        assert all(x.sinr_linear == y.sinr_linear for x, y in zip(a, b))

    def test_worker_count_invariant(self, fast_cfg, underlay):
        serial = simulate_u2u(fast_cfg, underlay, 30, seed=4, workers=1)
        parallel = simulate_u2u(fast_cfg, underlay, 30, seed=4, workers=2)
        assert all(x.sinr_linear == y.sinr_linear for x, y in zip(serial, parallel))

    def test_overlay_equals_underlay_with_matched_fields(self, fast_cfg):
        eta = 0.5
        cfg = fast_cfg.copy()
        cfg.eta_u = eta
        cfg.mode = "overlay"
        over = simulate_u2u(cfg, SharingMode.overlay(eta), 50, seed=11)
        cfg_u = cfg.copy()
        cfg_u.mode = "underlay"
        cfg_u.bs_density_per_km2 = 0.0
        cfg_u.uav_density_per_km2 = cfg.uav_density_per_km2 / eta
        under = simulate_u2u(cfg_u, SharingMode.underlay(eta), 50, seed=11)
        assert all(x.sinr_linear == y.sinr_linear for x, y in zip(over, under))


class TestPhysics:
    def test_noise_only_distribution(self, fast_cfg):
        cfg = fast_cfg.copy()
        cfg.uav_density_per_km2 = 0.0
        cfg.bs_density_per_km2 = 0.0
        mode = SharingMode.underlay(1.0)
        samples = simulate_u2u(cfg, mode, 20_000, seed=2)
        sinr = np.array([s.sinr_linear for s in samples])
        assert all(s.interference_uav == 0.0 and s.interference_gue == 0.0 for s in samples[:50])

        scn = Scenario(cfg, mode)

        def ccdf(t):
            from scipy import integrate

            def f(r):
                p_l = float(scn.p_los(LinkClass.UU, r))
                total = 0.0
                for p_cond, cond in ((p_l, Condition.LOS), (1 - p_l, Condition.NLOS)):
                    m = scn.table.m(LinkClass.UU, cond)
                    zeta = float(scn.zeta(LinkClass.UU, cond, r))
                    p_tx = float(scn.uav_tx_power(r, cond))
                    total += p_cond * float(
                        nakagami_ccdf(t * scn.noise_mw * zeta / p_tx, m)
                    )
                return total * float(u2u_distance_pdf(r, scn.u2u_dist))

            val = 0.0
            for lo, hi in ((0.0, 150.0), (150.0, 500.0)):
                v, _ = integrate.quad(f, lo, hi, limit=60)
                val += v
            return val

        for t_db in (-5.0, 5.0, 15.0):
            t = 10.0 ** (t_db / 10.0)
            emp = (sinr > t).mean()
            ref = ccdf(t)
            assert abs(emp - ref) < 3.5 * math.sqrt(ref * (1 - ref) / len(sinr)) + 1e-4

    def test_los_fraction_per_ring(self, fast_cfg, underlay):
        scn = Scenario(fast_cfg, underlay)
        rng = np.random.default_rng(77)
        radii, los = [], []
        for _ in range(150):
            snap = draw_u2u_snapshot(scn, underlay, rng)
            r = np.hypot(snap.uav_positions[:, 0], snap.uav_positions[:, 1])
            radii.append(r)
            los.append(snap.uav_link_los)
        radii = np.concatenate(radii)
        los = np.concatenate(los)
        edges = scn.rings(fast_cfg.sim.window_radius_m).breakpoints
        for lo, hi in zip(edges[:-1], edges[1:]):
            mask = (radii >= lo) & (radii < hi)
            n = mask.sum()
            if n < 50:
                continue
            p_ref = float(scn.p_los(LinkClass.UU, 0.5 * (lo + hi)))
            se = math.sqrt(max(p_ref * (1 - p_ref), 1e-9) / n)
            assert abs(los[mask].mean() - p_ref) <= 3.0 * se + 1e-9

    def test_mean_power_matches_closed_form(self, fast_cfg, underlay):
        scn = Scenario(fast_cfg, underlay)
        rng = np.random.default_rng(5)
        powers = []
        for _ in range(400):
            snap = draw_u2u_snapshot(scn, underlay, rng)
            powers.append(snap.uav_power)
        powers = np.concatenate(powers)
        ref = mean_uav_power(
            scn.u2u_dist, scn.pc_u, scn.table, scn.los, scn.heights.h_u
        )
        se = powers.std() / math.sqrt(len(powers))
        assert abs(powers.mean() - ref) <= 4.0 * se

    def test_window_far_field_share(self, fast_cfg, underlay):
        """Pilot check: recompute interference restricted to half the
        window from the stored snapshot arrays and compare means."""
        scn = Scenario(fast_cfg, underlay)
        rng = np.random.default_rng(21)
        total_g, near_g = [], []
        for _ in range(250):
            snap = draw_gue_snapshot(scn, underlay, rng)
            r = np.hypot(snap.gue_positions[:, 0], snap.gue_positions[:, 1])
            d2 = r**2 + scn.height_diff(LinkClass.GB) ** 2
            tau = np.where(
                snap.gue_link_los,
                scn.table.ref_linear(LinkClass.GB, Condition.LOS)
                * d2 ** (0.5 * scn.table.alpha(LinkClass.GB, Condition.LOS)),
                scn.table.ref_linear(LinkClass.GB, Condition.NLOS)
                * d2 ** (0.5 * scn.table.alpha(LinkClass.GB, Condition.NLOS)),
            )
            gain = scn.bs_gain_from_cos(scn.bs_cos_zenith(scn.heights.h_g, r))
            terms = snap.gue_power * snap.gue_fading * np.maximum(gain, 0.0) / tau
            total_g.append(terms.sum())
            near_g.append(terms[r <= 0.5 * fast_cfg.sim.window_radius_m].sum())
        far_share = 1.0 - np.sum(near_g) / np.sum(total_g)
        assert far_share < 0.01


class TestGueDrop:
    def test_interferers_farther_than_own_station(self, fast_cfg, underlay):
        scn = Scenario(fast_cfg, underlay)
        rng = np.random.default_rng(3)
        snap = draw_gue_snapshot(scn, underlay, rng)
        r = np.hypot(snap.gue_positions[:, 0], snap.gue_positions[:, 1])
        assert np.all(snap.gue_serving_distance < r)

    def test_needs_stations(self, fast_cfg, underlay):
        cfg = fast_cfg.copy()
        cfg.bs_density_per_km2 = 0.0
        with pytest.raises(DomainError):
            simulate_gue(cfg, underlay, 2, seed=1)

    def test_sample_decomposition(self, fast_cfg, underlay):
        samples = simulate_gue(fast_cfg, underlay, 20, seed=8)
        for s in samples:
            assert s.sinr_linear == pytest.approx(
                s.signal / (s.noise + s.interference_uav + s.interference_gue)
            )
            assert min(s.signal, s.interference_uav, s.interference_gue) >= 0.0
