import os

import pytest
from hypothesis import HealthCheck, settings

from twistlab import _kernels

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=15, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(params=["numpy", "numba"])
def backend(request):
    """Run a test once per kernel backend, restoring the previous one."""
    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    before = _kernels.backend()
    _kernels.set_backend(request.param)
    yield request.param
    _kernels.set_backend(before)


VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[VERDICTS] = []


@pytest.fixture
def verdict(request):
    """verdict(n, label, ok): print and record one acceptance line, then assert ok."""

    def record(n, label, ok, detail=""):
        line = f"criterion {n} ({label}): {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        print(line)
        request.config.stash[VERDICTS].append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
