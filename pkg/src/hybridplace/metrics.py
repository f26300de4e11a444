"""Failure rate, response-time and session-length summaries of a run."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .backends import ServiceOutcome, Status
from .placer import PlacementDecision, PlatformKind

FAILURE_STATUSES = (Status.TIMEOUT, Status.THROTTLE, Status.QUEUE_REJECT)


def nearest_rank(sorted_values: Sequence[float], q: float) -> Optional[float]:
    """Value at 1-based rank ceil(q*n) of an ascending sample; None if empty.

    ``q`` is taken at its decimal spelling so that 0.99 * 100 ranks 99, not 100.
    """
    n = len(sorted_values)
    if n == 0:
        return None
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    rank = math.ceil(Fraction(str(q)) * n)
    return sorted_values[max(rank, 1) - 1]


@dataclass(frozen=True)
class PlatformStats:
    count: int
    failure_rate: float
    response_time_p50: Optional[float]


@dataclass(frozen=True)
class MetricsReport:
    placer_name: str
    total_requests: int
    successes: int
    failures_by_status: dict[Status, int]
    failure_rate: float
    response_time_p50: Optional[float]
    response_time_p95: Optional[float]
    response_time_p99: Optional[float]
    session_length_mean: Optional[float]
    session_length_max: Optional[float]
    per_platform: dict[PlatformKind, PlatformStats] = field(default_factory=dict)

    def scalar_fields(self) -> dict:
        """Flat mapping used for CSV summaries."""
        row = {
            "placer_name": self.placer_name,
            "total_requests": self.total_requests,
            "successes": self.successes,
        }
        for status in FAILURE_STATUSES:
            row[status.value] = self.failures_by_status[status]
        row.update(
            failure_rate=self.failure_rate,
            response_time_p50=self.response_time_p50,
            response_time_p95=self.response_time_p95,
            response_time_p99=self.response_time_p99,
            session_length_mean=self.session_length_mean,
            session_length_max=self.session_length_max,
        )
        return row

    def to_dict(self) -> dict:
        d = self.scalar_fields()
        d["per_platform"] = {
            kind.value: {
                "count": s.count,
                "failure_rate": s.failure_rate,
                "response_time_p50": s.response_time_p50,
            }
            for kind, s in self.per_platform.items()
        }
        return d


def summarize(
    outcomes: Sequence[ServiceOutcome],
    decisions: Sequence[PlacementDecision],
    placer_name: str,
) -> MetricsReport:
    ids = [o.request_id for o in outcomes]
    if len(set(ids)) != len(ids) or set(ids) != {d.request_id for d in decisions} or len(
        decisions
    ) != len(ids):
        raise ValueError("outcome and decision logs cover different request ids")

    total = len(outcomes)
    failures = {s: 0 for s in FAILURE_STATUSES}
    responses = []
    for o in outcomes:
        if o.status is Status.SUCCESS:
            responses.append(o.response_time)
        else:
            failures[o.status] += 1
    responses.sort()
    sessions = [o.session_length for o in outcomes]
    successes = len(responses)

    per_platform = {}
    for kind in PlatformKind:
        mine = [o for o in outcomes if o.platform is kind]
        if not mine:
            continue
        rts = sorted(o.response_time for o in mine if o.status is Status.SUCCESS)
        per_platform[kind] = PlatformStats(
            count=len(mine),
            failure_rate=(len(mine) - len(rts)) / len(mine),
            response_time_p50=nearest_rank(rts, 0.5),
        )

    return MetricsReport(
        placer_name=placer_name,
        total_requests=total,
        successes=successes,
        failures_by_status=failures,
        failure_rate=(total - successes) / total if total else 0.0,
        response_time_p50=nearest_rank(responses, 0.5),
        response_time_p95=nearest_rank(responses, 0.95),
        response_time_p99=nearest_rank(responses, 0.99),
        session_length_mean=sum(sessions) / total if total else None,
        session_length_max=max(sessions) if sessions else None,
        per_platform=per_platform,
    )


def session_percentile(outcomes: Sequence[ServiceOutcome], q: float) -> Optional[float]:
    return nearest_rank(sorted(o.session_length for o in outcomes), q)


@dataclass(frozen=True)
class Comparison:
    reports: list[MetricsReport]
    winner: str
    tie: bool

    COLUMNS = (
        "placer_name",
        "total_requests",
        "failure_rate",
        "response_time_p50",
        "response_time_p95",
        "response_time_p99",
        "session_length_mean",
        "winner",
    )

    def rows(self) -> list[dict]:
        out = []
        for r in self.reports:
            flag = ""
            if r.placer_name == self.winner:
                flag = "tie" if self.tie else "yes"
            out.append(
                {
                    "placer_name": r.placer_name,
                    "total_requests": r.total_requests,
                    "failure_rate": r.failure_rate,
                    "response_time_p50": r.response_time_p50,
                    "response_time_p95": r.response_time_p95,
                    "response_time_p99": r.response_time_p99,
                    "session_length_mean": r.session_length_mean,
                    "winner": flag,
                }
            )
        return out


def compare(reports: Sequence[MetricsReport]) -> Comparison:
    """Pick the lowest failure rate; ties go to the earliest report and are flagged."""
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("compare needs at least two reports")
    best = min(r.failure_rate for r in reports)
    leaders = [r for r in reports if r.failure_rate == best]
    return Comparison(reports, leaders[0].placer_name, tie=len(leaders) > 1)
