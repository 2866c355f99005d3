from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"
CORPUS = sorted((DATA / "corpus").glob("*.png"))
COMPOSITE = DATA / "composite.png"
SWEEP_MANIFEST = DATA / "sweep" / "manifest.csv"

_criteria: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    outcome = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
    _criteria.setdefault(number, (title, []))[1].append(outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        if "FAIL" in outcomes:
            verdict = "FAIL"
        elif all(o == "SKIP" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        tr.write_line(f"criterion {number}: {verdict:4s}  {title}  ({len(outcomes)} checks)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
