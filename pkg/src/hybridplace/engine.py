"""Discrete-event loop routing arrivals through a placer onto the platforms."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .backends import (
    Job,
    QueueingPlatform,
    ServerlessPlatform,
    ServiceOutcome,
    Status,
    service_time_docker,
    service_time_flask,
)
from .placer import AvailabilityView, PlacementDecision, PlatformKind, place_dynamic, place_static
from .rng import Rng
from .scenario import ScenarioConfig
from .workload import FrequencyWindow, Request, generate_arrivals


class InvariantViolation(RuntimeError):
    """Internal simulation invariant broken; always fatal."""


class EventKind(str, enum.Enum):
    ARRIVAL = "arrival"
    SERVICE_START = "service_start"
    COMPLETION = "completion"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class Event:
    """Log entry, kept in processing order (service starts are inline)."""

    time: float
    sequence: int
    kind: EventKind
    request_id: int
    platform: Optional[PlatformKind] = None


PlacerChoice = Union[str, PlatformKind]
Placer = Callable[[Request, float, AvailabilityView], PlacementDecision]


def make_placer(choice: PlacerChoice, scenario: ScenarioConfig) -> tuple[str, Placer]:
    """Resolve ``"dynamic"`` or a platform name to (label, placer)."""
    if choice == "dynamic":
        thresholds = scenario.thresholds
        return "dynamic", lambda req, f_t, avail: place_dynamic(req, f_t, thresholds, avail)
    try:
        target = PlatformKind(choice)
    except ValueError:
        raise ValueError(f"unknown placer {choice!r}") from None
    return target.value, lambda req, f_t, avail: place_static(req, target)


@dataclass
class RunResult:
    placer_name: str
    requests: list[Request]
    decisions: list[PlacementDecision]
    outcomes: list[ServiceOutcome]
    events: list[Event] = field(default_factory=list)


class Engine:
    """One single-threaded simulation run.

    ``audit`` is called after every processed event with the engine itself;
    it may raise to stop the run.
    """

    def __init__(
        self,
        scenario: ScenarioConfig,
        placer: PlacerChoice = "dynamic",
        audit: Optional[Callable[["Engine"], None]] = None,
        record_events: bool = False,
    ) -> None:
        self.scenario = scenario
        self.placer_name, self._placer = make_placer(placer, scenario)
        self.audit = audit
        self.record_events = record_events
        self.clock = 0.0
        self._heap: list = []
        self._seq = 0
        self.window = FrequencyWindow(scenario.window_s)
        self.decisions: list[PlacementDecision] = []
        self.outcomes: list[ServiceOutcome] = []
        self.events: list[Event] = []
        self._jobs: dict[int, PlatformKind] = {}

        fm, dm = scenario.flask, scenario.docker
        self.flask = QueueingPlatform(
            PlatformKind.FLASK,
            fm.workers,
            fm.max_queue,
            fm.timeout,
            lambda size, cold: service_time_flask(fm, size),
            keep_warm=float("inf"),
            schedule=self._schedule,
            started=self._started,
        )
        self.docker = QueueingPlatform(
            PlatformKind.DOCKER,
            dm.containers,
            dm.max_queue,
            dm.timeout,
            lambda size, cold: service_time_docker(dm, size, cold),
            keep_warm=dm.keep_warm,
            schedule=self._schedule,
            started=self._started,
        )
        self.serverless = ServerlessPlatform(
            scenario.serverless, schedule=self._schedule, started=self._started
        )
        self.platforms = {
            PlatformKind.FLASK: self.flask,
            PlatformKind.DOCKER: self.docker,
            PlatformKind.SERVERLESS: self.serverless,
        }

    def _next_seq(self) -> int:
        seq = self._seq
        self._seq += 1
        return seq

    def _schedule(self, time: float, kind: str, payload) -> None:
        heapq.heappush(self._heap, (time, self._next_seq(), EventKind(kind), payload))

    def _started(self, now: float, job: Job) -> None:
        if self.record_events:
            rid = job.request.id
            self.events.append(
                Event(now, self._next_seq(), EventKind.SERVICE_START, rid, self._jobs[rid])
            )

    def availability_snapshot(self) -> AvailabilityView:
        return AvailabilityView(self.flask.has_capacity(), self.docker.has_capacity())

    def _finish(self, job: Job, platform: PlatformKind, status: Status, now: float) -> None:
        req = job.request
        self.outcomes.append(
            ServiceOutcome(req.id, platform, req.arrival_time, req.data_size, job.dispatch_time, now, status)
        )

    def _on_arrival(self, req: Request, now: float) -> None:
        # the arriving request counts toward its own frequency estimate
        self.window.record(now)
        f_t = self.window.estimate(now)
        decision = self._placer(req, f_t, self.availability_snapshot())
        self.decisions.append(decision)
        self._jobs[req.id] = decision.platform
        job = Job(req, now)
        status = self.platforms[decision.platform].admit(job, now)
        if status is not None:
            job.state = Job.DONE
            self._finish(job, decision.platform, status, now)

    def run(self, requests: list[Request]) -> RunResult:
        for req in requests:
            self._schedule(req.arrival_time, "arrival", req)
        while self._heap:
            time, seq, kind, payload = heapq.heappop(self._heap)
            if time < self.clock:
                raise InvariantViolation(f"clock moved backward: {self.clock} -> {time}")
            self.clock = time
            if kind is EventKind.ARRIVAL:
                if self.record_events:
                    self.events.append(Event(time, seq, kind, payload.id))
                self._on_arrival(payload, time)
            else:
                platform = self._jobs[payload.request.id]
                if self.record_events:
                    self.events.append(Event(time, seq, kind, payload.request.id, platform))
                backend = self.platforms[platform]
                handler = backend.complete if kind is EventKind.COMPLETION else backend.expire
                status = handler(payload, time)
                if status is not None:
                    self._finish(payload, platform, status, time)
            if self.audit is not None:
                self.audit(self)

        if len(self.outcomes) != len(requests):
            raise InvariantViolation(
                f"{len(requests)} arrivals but {len(self.outcomes)} outcomes after drain"
            )
        self.outcomes.sort(key=lambda o: o.request_id)
        self.decisions.sort(key=lambda d: d.request_id)
        return RunResult(self.placer_name, requests, self.decisions, self.outcomes, self.events)


def capacity_audit(engine: Engine) -> None:
    """Raise if any platform exceeds its concurrency or backlog bounds."""
    fm, dm, sm = engine.scenario.flask, engine.scenario.docker, engine.scenario.serverless
    checks = [
        (0 <= engine.flask.busy <= fm.workers, "flask in-service count out of bounds"),
        (0 <= engine.flask.backlog <= fm.workers + fm.max_queue, "flask backlog over bound"),
        (0 <= engine.docker.busy <= dm.containers, "docker in-service count out of bounds"),
        (0 <= engine.docker.backlog <= dm.containers + dm.max_queue, "docker backlog over bound"),
        (0 <= engine.serverless.in_flight <= sm.concurrency_limit, "serverless in-flight out of bounds"),
        (engine.flask.waiting == 0 or engine.flask.busy == fm.workers, "flask idle worker with waiting jobs"),
        (engine.docker.waiting == 0 or engine.docker.busy == dm.containers, "docker idle container with waiting jobs"),
    ]
    for ok, msg in checks:
        if not ok:
            raise InvariantViolation(f"t={engine.clock}: {msg}")


def run(
    scenario: ScenarioConfig,
    placer: PlacerChoice = "dynamic",
    *,
    audit: Optional[Callable[[Engine], None]] = None,
    record_events: bool = False,
    requests: Optional[list[Request]] = None,
) -> RunResult:
    """Generate the scenario's arrivals from its seed and simulate them to drain."""
    if requests is None:
        requests = generate_arrivals(scenario.phases, Rng(scenario.seed))
    engine = Engine(scenario, placer, audit=audit, record_events=record_events)
    return engine.run(requests)
