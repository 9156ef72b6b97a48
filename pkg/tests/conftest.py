import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from flucto import AtomParams

settings.register_profile("flucto", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("flucto")

ACCEPTANCE_LINES: list[str] = []

STANDARD = dict(gamma_d=0.05, gamma_a=0.015)
PAPER_OMEGAS = (0.1, 0.2625, 3.5)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


@pytest.fixture(params=PAPER_OMEGAS, ids=lambda w: f"omega={w}")
def paper_params(request):
    return AtomParams(omega=request.param, **STANDARD)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

