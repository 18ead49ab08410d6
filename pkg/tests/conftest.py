import numpy as np
import pytest

from volterra_weighted import kernels

BACKENDS = sorted(kernels.backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(kernels, "_impl", kernels.backends()[request.param])
    monkeypatch.setattr(kernels, "BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_series(rng, degree):
    return rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)


_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record the pass/fail line for one acceptance criterion."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
