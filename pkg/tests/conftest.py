"""Shared fixtures and the acceptance summary hook."""
import numpy as np
import pytest

from clusterx.hypergraph import MultiHypergraph

# criterion number -> (title, passed); filled by the acceptance suite
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n} ({title}): {'PASS' if ok else 'FAIL'}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle():
    return MultiHypergraph.from_edges([("a", "b"), ("b", "c"), ("c", "a")])


@pytest.fixture
def path3():
    return MultiHypergraph.from_edges([("a", "b"), ("b", "c")])
