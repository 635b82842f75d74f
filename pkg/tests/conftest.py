from __future__ import annotations

from pathlib import Path

import pytest

from circuma.domain import load_domain

DOMAINS = Path(__file__).resolve().parents[1] / "domains"
CRITERIA = {
    1: "quasihyperbolic closed forms at h = 1e-3 and 2.5e-4",
    2: "flavor comparison, 0 violations over 1000+ pairs",
    3: "Koebe fixpoint on a circle domain",
    4: "Koebe on the slit [-2, 2]",
    5: "rigidity under permuted sweep order",
    6: "modulus invariance on a two-component domain",
    7: "separation consistency on shipped domains",
    8: "counting bound on the 3x3 disc grid",
    9: "approximation sequence invariants and bounded A_est",
    10: "hyperbolicity: line, h-stability, determinism",
    11: "surgery length bound and antipodal arc equality",
    12: "property suites, 10^4 cases each",
}
_outcomes: dict[int, list[bool]] = {}


def domain(name: str):
    return load_domain(DOMAINS / f"{name}.json")


@pytest.fixture
def shipped():
    return domain


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(marker.args[0], []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, text in CRITERIA.items():
        got = _outcomes.get(n)
        status = "NOT RUN" if not got else ("PASS" if all(got) else "FAIL")
        terminalreporter.write_line(f"criterion {n:2d}: {status:7s} {text}")
