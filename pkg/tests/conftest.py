"""
Shared pytest fixtures for bfar-radar tests.

All fixtures write temporary files to pytest's tmp_path so nothing
is left on disk after the test run. Scans are kept small so the whole
suite stays fast; the full-size benchmark only runs under ``-m slow``.
"""

import numpy as np
import pytest

from bfar_radar.io import write_scan, write_scan_directory, write_trajectory
from bfar_radar.scan import PolarScan
from bfar_radar.simulator import SimConfig, build_benchmark

# ---------------------------------------------------------------------------
# Scan content helpers
# ---------------------------------------------------------------------------

#: Small simulator geometry: 180 azimuths x 160 bins at 0.5 m (80 m range).
SMALL_CONFIG = SimConfig(num_azimuths=180, num_range_bins=160, range_resolution=0.5)


def flat_scan(value: float = 1.0, shape: tuple[int, int] = (4, 64), resolution: float = 0.25):
    return PolarScan(np.full(shape, value), range_resolution=resolution)


def spiky_scan(
    spikes: dict[tuple[int, int], float],
    shape: tuple[int, int] = (4, 64),
    floor: float = 1.0,
    resolution: float = 0.25,
) -> PolarScan:
    """Constant floor with a few bright cells."""
    cells = np.full(shape, floor)
    for (row, col), value in spikes.items():
        cells[row, col] = value
    return PolarScan(cells, range_resolution=resolution)


def exponential_scan(
    seed: int = 0, shape: tuple[int, int] = (8, 256), mean: float = 10.0
) -> PolarScan:
    rng = np.random.default_rng(seed)
    return PolarScan(rng.exponential(mean, size=shape), range_resolution=0.25)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def small_scan():
    return spiky_scan({(0, 30): 500.0, (2, 25): 400.0, (3, 50): 300.0})


@pytest.fixture
def noise_scan():
    return exponential_scan()


@pytest.fixture(scope="session")
def small_benchmark():
    """Twelve poses through a 150-landmark world at the small geometry."""
    return build_benchmark(
        seed=42,
        num_poses=12,
        num_landmarks=150,
        step_m=1.5,
        yaw_rate=0.04,
        margin_m=50.0,
        config=SMALL_CONFIG,
    )


@pytest.fixture
def scan_file(tmp_path, small_scan):
    return write_scan(small_scan, tmp_path / "scan.csv")


@pytest.fixture
def pgm_file(tmp_path, small_scan):
    return write_scan(small_scan, tmp_path / "scan.pgm")


@pytest.fixture
def benchmark_dir(tmp_path, small_benchmark):
    """``scans/`` plus ``trajectory.csv`` for the small benchmark."""
    write_scan_directory(small_benchmark.scans, tmp_path / "scans", "csv_float")
    write_trajectory(small_benchmark.trajectory, tmp_path / "trajectory.csv")
    return tmp_path
