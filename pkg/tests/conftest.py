import numpy as np
import pytest

from measureflow import flow


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=flow.available_backends())
def backend(request):
    prev = flow.set_backend(request.param)
    yield request.param
    flow.set_backend(prev)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
