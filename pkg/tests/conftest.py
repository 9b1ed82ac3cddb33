import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hamlie.gf import field_create
from hamlie.ham import HamCtx

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def F5():
    return field_create(5)


@pytest.fixture
def F25():
    return field_create(5, 2)


@pytest.fixture
def H2():
    return HamCtx(field_create(5), 1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d} {name}: {'PASS' if ok else 'FAIL'}  {detail}")
