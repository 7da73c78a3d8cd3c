"""
bfar-radar
==========

Radar target detection with an affine noise-level threshold ``T = a * Z + b``.

Provides:
  - BFAR detection with pluggable noise estimators (CA, GO, SO, OS)
  - CA-CFAR, fixed-level and k-strongest baselines
  - Closed-form PFA / PD analysis with Monte Carlo validation
  - A synthetic spinning-radar simulator with ground truth
  - ICP odometry, KITTI-style trajectory metrics and grid-search learning of (a, b)

Quickstart
----------
>>> from bfar_radar import DetectorParams, build_benchmark, detect_scan
>>> bench = build_benchmark(seed=42, num_poses=3)
>>> detections = detect_scan(bench.scans[0], DetectorParams(scale_a=1.0, offset_b=20.0))
>>> detections.points.shape[1]
3

Closed-form analysis:

>>> from bfar_radar import pfa_upper_bound
>>> round(pfa_upper_bound(0.0, 40), 3)
1.0
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("bfar-radar")
except PackageNotFoundError:
    __version__ = "0.1.0-dev"

__author__ = "Chaitanya Kasaraneni"
__email__ = "kc.kasaraneni@gmail.com"
__license__ = "Apache 2.0"

from bfar_radar.analysis import (
    DetectionStats,
    ValidationRow,
    detection_stats,
    mc_estimate,
    mc_validate,
    pd_closed_form,
    pfa_closed_form,
    pfa_upper_bound,
    roc_curve,
    solve_a_for_bound,
    solve_b_for_pfa,
)
from bfar_radar.detector import (
    detect,
    detect_ca_cfar,
    detect_fixed_level,
    detect_scan,
    estimate_noise,
    k_strongest,
)
from bfar_radar.enums import EstimatorKind, Objective, RunStatus, ScanFormat, SweepParameter
from bfar_radar.errors import (
    BfarError,
    ConfigError,
    LearningError,
    ParameterError,
    RegistrationError,
    ScanFormatError,
    TrajectoryError,
)
from bfar_radar.estimators import register_estimator
from bfar_radar.io import read_scan, read_trajectory, register_codec, write_scan, write_trajectory
from bfar_radar.learning import GridSearchReport, grid_search, sensitivity_sweep
from bfar_radar.metrics import TrajectoryMetrics, evaluate_trajectory, kitti_relative_errors
from bfar_radar.odometry import IcpConfig, OdometryResult, chain_odometry, icp_register
from bfar_radar.params import DetectorParams, KStrongestParams
from bfar_radar.protocol import NoiseEstimator, ScanCodec
from bfar_radar.scan import DetectionSet, NoiseModel, PolarScan
from bfar_radar.simulator import SimConfig, build_benchmark, render_scan
from bfar_radar.trajectory import Pose2D, Trajectory, Transform2D

__all__ = [
    "PolarScan",
    "DetectionSet",
    "NoiseModel",
    "DetectorParams",
    "KStrongestParams",
    "EstimatorKind",
    "ScanFormat",
    "Objective",
    "RunStatus",
    "SweepParameter",
    "NoiseEstimator",
    "ScanCodec",
    "register_estimator",
    "register_codec",
    "detect",
    "detect_scan",
    "detect_ca_cfar",
    "detect_fixed_level",
    "k_strongest",
    "estimate_noise",
    "DetectionStats",
    "ValidationRow",
    "detection_stats",
    "pfa_upper_bound",
    "pfa_closed_form",
    "pd_closed_form",
    "solve_a_for_bound",
    "solve_b_for_pfa",
    "mc_estimate",
    "mc_validate",
    "roc_curve",
    "SimConfig",
    "build_benchmark",
    "render_scan",
    "Pose2D",
    "Transform2D",
    "Trajectory",
    "IcpConfig",
    "OdometryResult",
    "icp_register",
    "chain_odometry",
    "TrajectoryMetrics",
    "evaluate_trajectory",
    "kitti_relative_errors",
    "GridSearchReport",
    "grid_search",
    "sensitivity_sweep",
    "read_scan",
    "write_scan",
    "read_trajectory",
    "write_trajectory",
    "BfarError",
    "ParameterError",
    "ScanFormatError",
    "RegistrationError",
    "TrajectoryError",
    "LearningError",
    "ConfigError",
    "__version__",
]
