"""Coverage and rate analysis of UAV-to-UAV links sharing cellular uplink
spectrum: exact and approximate analytical tracks plus an independent
drop-based simulator, under underlay and overlay sharing."""

from .channel import (
    AntennaConfig,
    Condition,
    LinkClass,
    LosModelParams,
    LinkGeometry,
    NAKAGAMI_FIT_B,
    PropagationTable,
    RingPartition,
    U2UDistanceDist,
    bs_array_gain,
    gue_serving_distance_pdf,
    los_probability,
    nakagami_ccdf,
    nakagami_ccdf_fitted,
    path_loss,
    ring_partition,
    sample_fading,
    total_gain,
    u2u_distance_pdf,
    urban_propagation_table,
)
from .config import ScenarioConfig, config_hash, load_config
from .curves import CoverageCurve, SharingMode
from .errors import ConfigError, ConvergenceError, DomainError, ToleranceError
from .power import PowerControlParams, mean_uav_power, saturation_distance, tx_power_per_prb
from .scenario import Scenario
from .specfun import (
    DEFAULT_ACCURACY,
    FunctionAccuracy,
    gamma_fn,
    gauss_2f1,
    lower_incomplete_gamma,
    pochhammer,
)
from .analysis_exact import (
    LaplacianEvaluation,
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
from .analysis_approx import coverage_gue_approx, coverage_u2u_approx
from .montecarlo import (
    SinrSample,
    Snapshot,
    ccdf_from_samples,
    draw_gue_snapshot,
    draw_u2u_snapshot,
    rate_ccdf,
    sample_ppp_disc,
    simulate_gue,
    simulate_u2u,
)
from .cli import SweepSpec, emit, run

__version__ = "0.1.0"
