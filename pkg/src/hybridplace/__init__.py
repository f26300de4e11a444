"""Deterministic simulation of threshold-based request placement across
a local web server, a container pool and a serverless platform."""

__version__ = "0.1.0"

from .backends import Status
from .engine import Engine, RunResult, capacity_audit, run
from .metrics import compare, summarize
from .placer import PlatformKind, Thresholds, place_dynamic, place_static
from .scenario import ConfigError, ScenarioConfig, bundled_scenario, load_scenario
from .workload import Phase, Request, generate_arrivals

__all__ = [
    "ConfigError",
    "Engine",
    "Phase",
    "PlatformKind",
    "Request",
    "RunResult",
    "ScenarioConfig",
    "Status",
    "Thresholds",
    "bundled_scenario",
    "capacity_audit",
    "compare",
    "generate_arrivals",
    "load_scenario",
    "place_dynamic",
    "place_static",
    "run",
    "summarize",
]
