"""Service models for the three platforms and their admission/queue state.

Timing rules shared by all platforms:

* a request is dispatched at its arrival instant and fails at
  ``dispatch + timeout`` unless it has completed by then (completing
  exactly at the limit counts as success);
* an aborted request frees its worker/instance at the abort instant and
  the instance is discarded (cold on next use);
* an instance stays warm for ``keep_warm`` seconds after its last
  completion;
* queues are FIFO.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from .placer import PlatformKind
from .workload import Request


class Status(str, enum.Enum):
    SUCCESS = "success"
    TIMEOUT = "timeout_failure"
    THROTTLE = "throttle_failure"
    QUEUE_REJECT = "queue_reject_failure"


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class FlaskModel:
    base_service: float
    per_byte: float
    timeout: float
    max_queue: int
    workers: int = 1

    def __post_init__(self) -> None:
        _check(self.workers >= 1, "workers must be >= 1")
        _check(self.base_service > 0, "base_service must be > 0")
        _check(self.per_byte >= 0, "per_byte must be >= 0")
        _check(self.timeout > 0, "timeout must be > 0")
        _check(self.max_queue >= 0, "max_queue must be >= 0")

    def to_dict(self) -> dict:
        return {
            "workers": self.workers,
            "base_service": self.base_service,
            "per_byte": self.per_byte,
            "timeout": self.timeout,
            "max_queue": self.max_queue,
        }


@dataclass(frozen=True)
class DockerModel:
    containers: int
    cold_start: float
    keep_warm: float
    base_service: float
    per_byte: float
    timeout: float
    max_queue: int

    def __post_init__(self) -> None:
        _check(self.containers >= 1, "containers must be >= 1")
        _check(self.cold_start >= 0, "cold_start must be >= 0")
        _check(self.keep_warm >= 0, "keep_warm must be >= 0")
        _check(self.base_service > 0, "base_service must be > 0")
        _check(self.per_byte >= 0, "per_byte must be >= 0")
        _check(self.timeout > 0, "timeout must be > 0")
        _check(self.max_queue >= 0, "max_queue must be >= 0")

    def to_dict(self) -> dict:
        return {
            "containers": self.containers,
            "cold_start": self.cold_start,
            "keep_warm": self.keep_warm,
            "base_service": self.base_service,
            "per_byte": self.per_byte,
            "timeout": self.timeout,
            "max_queue": self.max_queue,
        }


@dataclass(frozen=True)
class ServerlessModel:
    concurrency_limit: int
    cold_start: float
    keep_warm: float
    memory_mb: float
    ref_memory_mb: float
    base_service: float
    per_byte: float
    timeout: float

    def __post_init__(self) -> None:
        _check(self.concurrency_limit >= 1, "concurrency_limit must be >= 1")
        _check(self.cold_start >= 0, "cold_start must be >= 0")
        _check(self.keep_warm >= 0, "keep_warm must be >= 0")
        _check(self.memory_mb > 0, "memory_mb must be > 0")
        _check(self.ref_memory_mb > 0, "ref_memory_mb must be > 0")
        _check(self.base_service > 0, "base_service must be > 0")
        _check(self.per_byte >= 0, "per_byte must be >= 0")
        _check(self.timeout > 0, "timeout must be > 0")

    def to_dict(self) -> dict:
        return {
            "concurrency_limit": self.concurrency_limit,
            "cold_start": self.cold_start,
            "keep_warm": self.keep_warm,
            "memory_mb": self.memory_mb,
            "ref_memory_mb": self.ref_memory_mb,
            "base_service": self.base_service,
            "per_byte": self.per_byte,
            "timeout": self.timeout,
        }


def service_time_flask(model: FlaskModel, data_size: int) -> float:
    return model.base_service + model.per_byte * data_size


def service_time_docker(model: DockerModel, data_size: int, is_cold: bool) -> float:
    t = model.base_service + model.per_byte * data_size
    return t + model.cold_start if is_cold else t


def service_time_serverless(model: ServerlessModel, data_size: int, is_cold: bool) -> float:
    """Compute time scales inversely with provisioned memory; cold start is additive."""
    t = (model.base_service + model.per_byte * data_size) * (model.ref_memory_mb / model.memory_mb)
    return t + model.cold_start if is_cold else t


@dataclass(frozen=True)
class ServiceOutcome:
    request_id: int
    platform: PlatformKind
    arrival_time: float
    data_size: int
    dispatch_time: float
    end_time: float
    status: Status

    @property
    def response_time(self) -> Optional[float]:
        if self.status is Status.SUCCESS:
            return self.end_time - self.dispatch_time
        return None

    @property
    def session_length(self) -> float:
        return self.end_time - self.arrival_time


class Job:
    """Mutable per-request record owned by one platform."""

    __slots__ = ("request", "dispatch_time", "state", "end_time")

    WAITING, RUNNING, DONE = 0, 1, 2

    def __init__(self, request: Request, dispatch_time: float) -> None:
        self.request = request
        self.dispatch_time = dispatch_time
        self.state = Job.WAITING
        self.end_time = math.inf


class InstancePool:
    """Warmth bookkeeping for idle instances.

    Idle warm instances sit on a stack ordered by release time, so the most
    recently used one is reused first and an expired top means every
    instance below it has expired too.
    """

    def __init__(self, keep_warm: float) -> None:
        self.keep_warm = keep_warm
        self._warm: list[float] = []

    def acquire(self, now: float) -> bool:
        """Take an instance; returns True when it has to cold start."""
        if self._warm:
            last = self._warm.pop()
            if now - last <= self.keep_warm:
                return False
            self._warm.clear()
        return True

    def release(self, now: float, warm: bool) -> None:
        if warm:
            self._warm.append(now)


Schedule = Callable[[float, str, Job], None]
Started = Callable[[float, Job], None]


def _ignore_start(now: float, job: Job) -> None:
    pass


class QueueingPlatform:
    """A fixed pool of servers behind a bounded FIFO queue (Flask, Docker)."""

    def __init__(
        self,
        kind: PlatformKind,
        servers: int,
        max_queue: int,
        timeout: float,
        service_time: Callable[[int, bool], float],
        keep_warm: float,
        schedule: Schedule,
        started: Started = _ignore_start,
    ) -> None:
        self.kind = kind
        self.servers = servers
        self.max_queue = max_queue
        self.timeout = timeout
        self.service_time = service_time
        self.pool = InstancePool(keep_warm)
        self.schedule = schedule
        self.started = started
        self.busy = 0
        self.waiting = 0
        self._queue: deque[Job] = deque()

    @property
    def backlog(self) -> int:
        return self.busy + self.waiting

    def has_capacity(self) -> bool:
        return self.backlog < self.servers + self.max_queue

    def admit(self, job: Job, now: float) -> Optional[Status]:
        """Returns None when enqueued, else the immediate failure status."""
        rejected = admission_status(self.backlog, self.servers, self.max_queue)
        if rejected is not None:
            return rejected
        self.schedule(now + self.timeout, "timeout", job)
        if self.busy < self.servers:
            self._start(job, now)
        else:
            self._queue.append(job)
            self.waiting += 1
        return None

    def _start(self, job: Job, now: float) -> None:
        cold = self.pool.acquire(now)
        job.state = Job.RUNNING
        job.end_time = now + self.service_time(job.request.data_size, cold)
        self.busy += 1
        self.started(now, job)
        self.schedule(job.end_time, "completion", job)

    def _start_next(self, now: float) -> None:
        while self._queue and self.busy < self.servers:
            job = self._queue.popleft()
            if job.state != Job.WAITING:
                continue  # timed out while queued
            self.waiting -= 1
            self._start(job, now)

    def complete(self, job: Job, now: float) -> Optional[Status]:
        if job.state != Job.RUNNING:
            return None
        job.state = Job.DONE
        self.busy -= 1
        self.pool.release(now, warm=True)
        self._start_next(now)
        return Status.SUCCESS

    def expire(self, job: Job, now: float) -> Optional[Status]:
        if job.state == Job.DONE:
            return None
        if job.state == Job.WAITING:
            job.state = Job.DONE
            self.waiting -= 1
            return Status.TIMEOUT
        if job.end_time - job.dispatch_time <= self.timeout:
            return None  # finishes exactly at the limit; completion still pending
        job.state = Job.DONE
        self.busy -= 1
        self.pool.release(now, warm=False)
        self._start_next(now)
        return Status.TIMEOUT


class ServerlessPlatform:
    """Instances start on demand up to a concurrency limit; no queue."""

    kind = PlatformKind.SERVERLESS

    def __init__(
        self, model: ServerlessModel, schedule: Schedule, started: Started = _ignore_start
    ) -> None:
        self.model = model
        self.timeout = model.timeout
        self.limit = model.concurrency_limit
        self.pool = InstancePool(model.keep_warm)
        self.schedule = schedule
        self.started = started
        self.in_flight = 0

    def admit(self, job: Job, now: float) -> Optional[Status]:
        throttled = serverless_admission(self.in_flight, self.limit)
        if throttled is not None:
            return throttled
        self.schedule(now + self.timeout, "timeout", job)
        cold = self.pool.acquire(now)
        job.state = Job.RUNNING
        job.end_time = now + service_time_serverless(self.model, job.request.data_size, cold)
        self.in_flight += 1
        self.started(now, job)
        self.schedule(job.end_time, "completion", job)
        return None

    def complete(self, job: Job, now: float) -> Optional[Status]:
        if job.state != Job.RUNNING:
            return None
        job.state = Job.DONE
        self.in_flight -= 1
        self.pool.release(now, warm=True)
        return Status.SUCCESS

    def expire(self, job: Job, now: float) -> Optional[Status]:
        if job.state != Job.RUNNING:
            return None
        if job.end_time - job.dispatch_time <= self.timeout:
            return None
        job.state = Job.DONE
        self.in_flight -= 1
        self.pool.release(now, warm=False)
        return Status.TIMEOUT


def admission_status(backlog: int, servers: int, max_queue: int) -> Optional[Status]:
    """Stateless admission rule for Flask/Docker; None means enqueued."""
    return None if backlog < servers + max_queue else Status.QUEUE_REJECT


def serverless_admission(in_flight: int, limit: int) -> Optional[Status]:
    return None if in_flight < limit else Status.THROTTLE
