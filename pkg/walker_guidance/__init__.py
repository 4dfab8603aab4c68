"""Top-level package for walker-guidance."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("walker-guidance")
except PackageNotFoundError:
    __version__ = "uninstalled"

from .main import run_scenario, simulate_scenario
from .metrics import compute_metrics
from .paths import Path, Pose, load_path, make_study_path, project, save_path
from .scenario import Scenario, load_scenario
from .trial import SimulationConfig, run_trial
from .user import UserModel

__all__ = [
    "Path",
    "Pose",
    "Scenario",
    "SimulationConfig",
    "UserModel",
    "__version__",
    "compute_metrics",
    "load_path",
    "load_scenario",
    "make_study_path",
    "project",
    "run_scenario",
    "run_trial",
    "save_path",
    "simulate_scenario",
]
