"""Hurst index estimation for SDEs driven by fractional Brownian motion."""

__version__ = "0.1.0"

from .errors import (
    DegeneratePathError,
    DomainError,
    HurstQVError,
    InversionRangeError,
    NearZeroDiffusionError,
    SimulationError,
    SynthesisError,
)
from .estimate import (
    HurstEstimate,
    estimate_from_stats,
    estimate_hn,
    estimate_known_g,
    estimate_localized,
    phi,
    phi_inverse,
)
from .estimators import QVHurstEstimator
from .experiment import ExperimentConfig, run_experiment, summarize, write_report
from .fbm import (
    FgnSample,
    cholesky_fgn_oracle,
    eigen_moment_stats,
    fbm_path,
    fgn_autocovariance,
    generate_fgn,
    second_increment_cov,
)
from .paths import SamplePath, read_path_csv, write_path_csv
from .quadvar import GridDesign, WindowStats, second_diff, select_index, v_tilde, window_stats
from .sde import PROCESSES, ProcessSpec, affine_process, simulate, simulate_with_driver
from .variance import VarianceConstants, rho, sigma_mc_oracle, variance_constants
