import warnings

import numpy as np
import pytest

from tribeta.randsrc import RngStream


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20261018)


@pytest.fixture
def stream():
    def make(j: int = 0, seed: int = 11) -> RngStream:
        return RngStream(seed, j)

    return make


@pytest.fixture(autouse=True)
def _quiet_numba_cache():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", category=DeprecationWarning)
        yield


def pytest_addoption(parser):
    parser.addoption("--full", action="store_true", default=False, help="run the long n = 5000 KS profile")


def pytest_configure(config):
    config.addinivalue_line("markers", "full: long-running profile, enabled with --full")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--full"):
        return
    skip = pytest.mark.skip(reason="needs --full")
    for item in items:
        if "full" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
