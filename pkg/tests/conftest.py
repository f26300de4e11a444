import dataclasses

import pytest

from hybridplace import bundled_scenario
from hybridplace.backends import DockerModel, FlaskModel, ServerlessModel
from hybridplace.workload import ConstantSize, Phase, Request

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def base_scenario():
    return bundled_scenario("flask_knee")


@pytest.fixture
def three_at_zero():
    return [Request(i, 0.0, 1000) for i in range(3)]


@pytest.fixture
def flask_trace_scenario(base_scenario):
    return dataclasses.replace(base_scenario, flask=FlaskModel(1.0, 0.0, 2.0, 10, workers=1))


@pytest.fixture
def docker_trace_scenario(base_scenario):
    return dataclasses.replace(base_scenario, docker=DockerModel(2, 0.5, 300.0, 1.0, 0.0, 50.0, 10))


@pytest.fixture
def serverless_trace_scenario(base_scenario):
    return dataclasses.replace(
        base_scenario, serverless=ServerlessModel(2, 0.3, 300.0, 3072, 3072, 0.5, 0.0, 50.0)
    )


def constant_load(scenario, sessions_per_180s, duration=180.0):
    """Replace the workload with one constant-rate phase keeping the size law."""
    rate = sessions_per_180s / 180.0
    dist = scenario.phases[0].size_dist if scenario.phases else ConstantSize(1000)
    return dataclasses.replace(scenario, phases=(Phase(duration, rate, rate, dist),))
