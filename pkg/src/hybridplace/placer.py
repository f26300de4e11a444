"""Threshold placement of requests onto platforms, plus fixed baselines."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .workload import Request


class PlatformKind(str, enum.Enum):
    FLASK = "flask"
    DOCKER = "docker"
    SERVERLESS = "serverless"


@dataclass(frozen=True)
class Thresholds:
    frequency_threshold: float  # requests/second
    size_threshold: float  # bytes

    def __post_init__(self) -> None:
        if not self.frequency_threshold > 0:
            raise ValueError("frequency_threshold must be > 0")
        if not self.size_threshold > 0:
            raise ValueError("size_threshold must be > 0")

    def to_dict(self) -> dict:
        return {
            "frequency_threshold": self.frequency_threshold,
            "size_threshold": self.size_threshold,
        }


@dataclass(frozen=True)
class AvailabilityView:
    flask_has_capacity: bool
    docker_has_capacity: bool


@dataclass(frozen=True)
class PlacementDecision:
    request_id: int
    platform: PlatformKind
    decided_at: float


def choose_platform(
    f_t: float, data_size: float, thresholds: Thresholds, avail: AvailabilityView
) -> PlatformKind:
    """Top-down branch cascade; every comparison is strict so ties fall through."""
    F = thresholds.frequency_threshold
    D = thresholds.size_threshold
    if f_t > F and data_size < D:
        return PlatformKind.SERVERLESS
    if data_size > D:
        return PlatformKind.DOCKER
    if avail.flask_has_capacity:
        return PlatformKind.FLASK
    if avail.docker_has_capacity:
        return PlatformKind.DOCKER
    return PlatformKind.SERVERLESS


def place_dynamic(
    request: Request, f_t: float, thresholds: Thresholds, avail: AvailabilityView
) -> PlacementDecision:
    platform = choose_platform(f_t, request.data_size, thresholds, avail)
    return PlacementDecision(request.id, platform, request.arrival_time)


def place_static(request: Request, target: PlatformKind) -> PlacementDecision:
    return PlacementDecision(request.id, PlatformKind(target), request.arrival_time)
