"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import numpy as np
import pytest

from flowlab.kinematics import LabeledFlow

ACCEPTANCE_TITLES = {
    1: "Kirchhoff reproduction",
    2: "Gerstner certification",
    3: "matrix lemmas",
    4: "family invariants",
    5: "vorticity identity and conservation",
    6: "Schwarzian theory",
    7: "negative controls",
    8: "determinism",
}

_outcomes: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number covered by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n = marker.args[0]
    _outcomes.setdefault(n, []).append((item.name, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_TITLES):
        results = _outcomes.get(n)
        if not results:
            continue
        ok = all(passed for _, passed in results)
        failed = [name for name, passed in results if not passed]
        line = f"criterion {n} ({ACCEPTANCE_TITLES[n]}): {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f"  [failing: {', '.join(failed)}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gerstner_flow():
    return LabeledFlow.from_preset("gerstner")


@pytest.fixture(scope="session")
def kirchhoff_flow():
    return LabeledFlow.from_preset("kirchhoff")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
