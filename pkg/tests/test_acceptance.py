"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""

import contextlib
import dataclasses
import itertools
import math
import random
import time
from fractions import Fraction


from conftest import ACCEPTANCE_LINES, constant_load
from scenario_gen import random_scenario
from hybridplace import bundled_scenario
from hybridplace.backends import ServiceOutcome, Status
from hybridplace.engine import capacity_audit, run
from hybridplace.metrics import session_percentile, summarize
from hybridplace.output import render_trace
from hybridplace.placer import AvailabilityView, PlatformKind, Thresholds, choose_platform
from hybridplace.rng import Rng
from hybridplace.workload import ConstantSize, Phase, UniformSize, generate_arrivals

FLASK, DOCKER, SERVERLESS = PlatformKind.FLASK, PlatformKind.DOCKER, PlatformKind.SERVERLESS


@contextlib.contextmanager
def criterion(number, title, limit_s):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit_s, f"took {elapsed:.2f}s, limit {limit_s}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"AC{number} FAIL  {title} ({elapsed:.2f}s): {exc}")
        raise
    ACCEPTANCE_LINES.append(f"AC{number} PASS  {title} ({elapsed:.2f}s < {limit_s}s)")


def report(result):
    return summarize(result.outcomes, result.decisions, result.placer_name)


# Hand-derived branch table: the (frequency, size) cell either fixes the
# platform or defers to the availability cascade flask -> docker -> serverless.
CASCADE = "cascade"
BRANCH_TABLE = {
    ("below", "below"): CASCADE,
    ("below", "equal"): CASCADE,
    ("below", "above"): DOCKER,
    ("equal", "below"): CASCADE,
    ("equal", "equal"): CASCADE,
    ("equal", "above"): DOCKER,
    ("above", "below"): SERVERLESS,
    ("above", "equal"): CASCADE,
    ("above", "above"): DOCKER,
}


def test_ac1_branch_table():
    with criterion(1, "dynamic placer branch grid, 36 cases", 1.0):
        F, D = 50.0, 5_000_000.0
        th = Thresholds(F, D)
        eps_f, eps_d = 1e-3, 1.0
        freqs = {"below": F - eps_f, "equal": F, "above": F + eps_f}
        sizes = {"below": D - eps_d, "equal": D, "above": D + eps_d}
        deviations, cases = [], 0
        for (fk, f), (dk, d), (fl, dok) in itertools.product(
            freqs.items(), sizes.items(), itertools.product([True, False], repeat=2)
        ):
            cases += 1
            expected = BRANCH_TABLE[fk, dk]
            if expected == CASCADE:
                expected = FLASK if fl else DOCKER if dok else SERVERLESS
            got = choose_platform(f, d, th, AvailabilityView(fl, dok))
            if got is not expected:
                deviations.append((fk, dk, fl, dok, got, expected))
        assert cases == 36
        assert deviations == []


def _trace(platform, ends, statuses):
    return [
        ServiceOutcome(i, platform, 0.0, 1000, 0.0, end, status)
        for i, (end, status) in enumerate(zip(ends, statuses))
    ]


def test_ac2_hand_traces(flask_trace_scenario, docker_trace_scenario, serverless_trace_scenario, three_at_zero):
    with criterion(2, "engine matches three hand-simulated traces", 1.0):
        ok = Status.SUCCESS
        cases = [
            (flask_trace_scenario, "flask", _trace(FLASK, [1.0, 2.0, 2.0], [ok, ok, Status.TIMEOUT])),
            (docker_trace_scenario, "docker", _trace(DOCKER, [1.5, 1.5, 2.5], [ok, ok, ok])),
            (serverless_trace_scenario, "serverless", _trace(SERVERLESS, [0.8, 0.8, 0.0], [ok, ok, Status.THROTTLE])),
        ]
        for scenario, placer, expected in cases:
            result = run(scenario, placer, requests=three_at_zero, audit=capacity_audit)
            assert result.outcomes == expected, placer
            decisions = [(d.request_id, d.platform) for d in result.decisions]
            assert decisions == [(i, PlatformKind(placer)) for i in range(3)]
            assert render_trace(result.outcomes, result.decisions) == render_trace(expected, result.decisions)


def test_ac3_flask_capacity_knee():
    with criterion(3, "flask knee at analytic capacity 180/0.1094", 10.0):
        base = bundled_scenario("flask_knee")
        assert base.flask.workers == 1 and base.flask.base_service == 0.1094 and base.flask.timeout == 50.0
        knee = math.ceil(180 / 0.1094) + 1
        rates, p95 = {}, {}
        for n in range(600, 2001, 100):
            result = run(constant_load(base, n), "flask", audit=capacity_audit)
            assert len(result.requests) == n
            rates[n] = report(result).failure_rate
            p95[n] = session_percentile(result.outcomes, 0.95)
        assert all(rates[n] == 0 for n in rates if n < 1600), rates
        assert all(rates[n] > 0 for n in rates if n >= knee), rates
        assert p95[2000] >= 10 * p95[600], (p95[600], p95[2000])


def test_ac4_serverless_flat_latency():
    with criterion(4, "serverless median flat (<1.25x), flask median spreads (>5x)", 10.0):
        base = bundled_scenario("serverless_band")
        base = dataclasses.replace(base, serverless=dataclasses.replace(base.serverless, concurrency_limit=1000))
        medians = {"serverless": [], "flask": []}
        for n in (600, 2000, 4000):
            for placer in medians:
                rep = report(run(constant_load(base, n), placer))
                if placer == "serverless":
                    assert rep.failures_by_status[Status.THROTTLE] == 0
                medians[placer].append(rep.response_time_p50)
        s, f = medians["serverless"], medians["flask"]
        assert max(s) / min(s) < 1.25, s
        assert max(f) / min(f) > 5, f


def _with_memory(scenario, mb):
    return dataclasses.replace(scenario, serverless=dataclasses.replace(scenario.serverless, memory_mb=mb))


def test_ac5_memory_monotonicity():
    with criterion(5, "3072 MB never worse than 2048 MB", 10.0):
        band = bundled_scenario("serverless_band")
        # heavy payloads: some 2048 MB invocations exceed the 50 s timeout
        heavy = dataclasses.replace(
            band,
            phases=(Phase(60.0, 2.0, 2.0, UniformSize(100_000, 20_000_000)),),
            serverless=dataclasses.replace(band.serverless, per_byte=2e-6, concurrency_limit=1000),
        )
        scenarios = [constant_load(band, n) for n in (600, 2000, 4000, 6000)] + [heavy]
        saw_timeout = False
        for scenario in scenarios:
            small = report(run(_with_memory(scenario, 2048), "serverless"))
            large = report(run(_with_memory(scenario, 3072), "serverless"))
            assert large.failure_rate <= small.failure_rate
            assert large.response_time_p50 <= small.response_time_p50
            if small.failures_by_status[Status.TIMEOUT] > 0:
                saw_timeout = True
                assert large.failure_rate < small.failure_rate
        assert saw_timeout


def test_ac6_dynamic_beats_static():
    with criterion(6, "dynamic placer beats every static placer on mixed_dynamic", 30.0):
        scenario = bundled_scenario("mixed_dynamic")
        reports = {p: report(run(scenario, p)) for p in ("dynamic", "flask", "docker", "serverless")}
        dyn = reports.pop("dynamic")
        for name, rep in reports.items():
            assert dyn.failure_rate < rep.failure_rate, (name, dyn.failure_rate, rep.failure_rate)
        best_p50 = min(r.response_time_p50 for r in reports.values() if r.response_time_p50 is not None)
        assert dyn.response_time_p50 <= best_p50 * 1.5, (dyn.response_time_p50, best_p50)


def test_ac7_randomized_properties():
    with criterion(7, "100 random scenarios: determinism, conservation, capacity, timeouts", 60.0):
        rnd = random.Random(20241015)
        for _ in range(100):
            scenario = random_scenario(rnd)
            placer = rnd.choice(["dynamic", "flask", "docker", "serverless"])
            a = run(scenario, placer, audit=capacity_audit)
            b = run(scenario, placer, audit=capacity_audit)
            assert render_trace(a.outcomes, a.decisions) == render_trace(b.outcomes, b.decisions)
            rep = report(a)
            assert rep.successes + sum(rep.failures_by_status.values()) == len(a.requests)
            timeouts = {
                FLASK: scenario.flask.timeout,
                DOCKER: scenario.docker.timeout,
                SERVERLESS: scenario.serverless.timeout,
            }
            for o in a.outcomes:
                if o.status is Status.SUCCESS:
                    assert o.response_time <= timeouts[o.platform]


def test_ac8_workload_analytics():
    with criterion(8, "arrival counts equal floor of rate integral; closed-form ramp", 1.0):
        rnd = random.Random(8)
        for _ in range(50):
            phase = Phase(rnd.uniform(0.5, 30), rnd.uniform(0, 40), rnd.uniform(0, 40), ConstantSize(1))
            lam = Fraction(phase.duration) * (Fraction(phase.start_rate) + Fraction(phase.end_rate)) / 2
            assert len(generate_arrivals([phase], Rng(1))) == math.floor(lam)
        ramp = generate_arrivals([Phase(2.0, 0.0, 4.0, ConstantSize(1))], Rng(0))
        expected = [1.0, math.sqrt(2), math.sqrt(3), 2.0]
        assert len(ramp) == 4
        assert all(abs(r.arrival_time - e) <= 1e-9 for r, e in zip(ramp, expected))
