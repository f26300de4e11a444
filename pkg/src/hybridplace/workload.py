"""Deterministic request streams and the sliding-window frequency estimate."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

from .rng import Rng

# Guards floor() against representation error, e.g. (600/180)*180 == 599.999...
_COUNT_EPS = 1e-9


@dataclass(frozen=True)
class Request:
    id: int
    arrival_time: float
    data_size: int


@dataclass(frozen=True)
class ConstantSize:
    bytes: int

    def __post_init__(self) -> None:
        if self.bytes <= 0:
            raise ValueError("constant size must be > 0")

    def draw(self, rng: Rng) -> int:
        return self.bytes

    def to_dict(self) -> dict:
        return {"kind": "constant", "bytes": self.bytes}


@dataclass(frozen=True)
class UniformSize:
    min_bytes: int
    max_bytes: int

    def __post_init__(self) -> None:
        if self.min_bytes <= 0:
            raise ValueError("uniform min_bytes must be > 0")
        if self.min_bytes > self.max_bytes:
            raise ValueError("uniform requires min_bytes <= max_bytes")

    def draw(self, rng: Rng) -> int:
        return rng.randint(self.min_bytes, self.max_bytes)

    def to_dict(self) -> dict:
        return {"kind": "uniform", "min_bytes": self.min_bytes, "max_bytes": self.max_bytes}


@dataclass(frozen=True)
class BimodalSize:
    """Two-point mixture: ``large_bytes`` with probability ``large_fraction``."""

    small_bytes: int
    large_bytes: int
    large_fraction: float

    def __post_init__(self) -> None:
        if self.small_bytes <= 0 or self.large_bytes <= 0:
            raise ValueError("bimodal sizes must be > 0")
        if not 0.0 <= self.large_fraction <= 1.0:
            raise ValueError("bimodal large_fraction must lie in [0, 1]")

    def draw(self, rng: Rng) -> int:
        return self.large_bytes if rng.next_float() < self.large_fraction else self.small_bytes

    def to_dict(self) -> dict:
        return {
            "kind": "bimodal",
            "small_bytes": self.small_bytes,
            "large_bytes": self.large_bytes,
            "large_fraction": self.large_fraction,
        }


SizeDist = Union[ConstantSize, UniformSize, BimodalSize]


@dataclass(frozen=True)
class Phase:
    """One linear rate ramp, in requests/second, lasting ``duration`` seconds."""

    duration: float
    start_rate: float
    end_rate: float
    size_dist: SizeDist

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError("phase duration must be > 0")
        if self.start_rate < 0 or self.end_rate < 0:
            raise ValueError("phase rates must be >= 0")

    def expected_count(self) -> float:
        """Integral of the rate over the whole phase."""
        return 0.5 * (self.start_rate + self.end_rate) * self.duration

    def arrival_count(self) -> int:
        lam = self.expected_count()
        return math.floor(lam + _COUNT_EPS * max(1.0, lam))

    def arrival_offsets(self) -> list[float]:
        """Local times at which the cumulative rate integral crosses 1, 2, 3, ..."""
        a = self.start_rate
        c = (self.end_rate - self.start_rate) / (2.0 * self.duration)
        offsets = []
        for k in range(1, self.arrival_count() + 1):
            # root of c*t^2 + a*t - k = 0 in the cancellation-free form
            disc = max(a * a + 4.0 * c * k, 0.0)
            t = 2.0 * k / (a + math.sqrt(disc))
            offsets.append(min(t, self.duration))
        return offsets

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "start_rate": self.start_rate,
            "end_rate": self.end_rate,
            "size_dist": self.size_dist.to_dict(),
        }


def generate_arrivals(phases: Iterable[Phase], rng: Rng) -> list[Request]:
    """Build the arrival stream for consecutive phases.

    Sizes are drawn in arrival order, one draw per request (none for
    constant sizes), so the stream is a pure function of phases and seed.
    """
    phases = list(phases)
    if not phases:
        raise ValueError("phases must be non-empty")
    requests: list[Request] = []
    start = 0.0
    for phase in phases:
        for offset in phase.arrival_offsets():
            size = phase.size_dist.draw(rng)
            requests.append(Request(len(requests), start + offset, size))
        start += phase.duration
    return requests


@dataclass
class FrequencyWindow:
    """Arrival timestamps in the trailing half-open window (now - W, now]."""

    window_length: float = 1.0
    timestamps: deque = field(default_factory=deque)

    def __post_init__(self) -> None:
        if not self.window_length > 0:
            raise ValueError("window_length must be > 0")

    def record(self, t: float) -> None:
        if self.timestamps and t < self.timestamps[-1]:
            raise ValueError("timestamps must be recorded in non-decreasing order")
        self.timestamps.append(t)

    def prune(self, now: float) -> None:
        cutoff = now - self.window_length
        while self.timestamps and self.timestamps[0] <= cutoff:
            self.timestamps.popleft()

    def estimate(self, now: float) -> float:
        # after pruning every stored timestamp is inside the window
        self.prune(now)
        return len(self.timestamps) / self.window_length


def frequency_estimate(window: FrequencyWindow, now: float) -> float:
    """Requests/second over (now - W, now]; does not mutate ``window``."""
    cutoff = now - window.window_length
    count = sum(1 for t in window.timestamps if cutoff < t <= now)
    return count / window.window_length
