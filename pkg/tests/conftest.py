import numpy as np
import pytest

from u2ucell.config import ScenarioConfig
from u2ucell.curves import SharingMode


@pytest.fixture
def default_cfg():
    return ScenarioConfig()


@pytest.fixture
def fast_cfg():
    """Coarse truncations for quick analytical evaluations in unit tests."""
    cfg = ScenarioConfig()
    cfg.numerics.ring_truncation_m = 3000.0
    cfg.sim.window_radius_m = 3000.0
    cfg.numerics.serving_points_per_panel = 8
    cfg.numerics.mixture_points_per_panel = 6
    cfg.sim.drops = 2000
    return cfg


@pytest.fixture
def underlay():
    return SharingMode.underlay(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def gl_nodes(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x, 0.5 * (hi - lo) * w
