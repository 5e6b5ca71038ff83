import time

import pytest

from zkbridge.sim import adversarial_scenario, run_scenario

CAMPAIGN_SEEDS = 1000
_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _criteria[item.nodeid] = m.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.outcome != "passed":
        # a setup or teardown failure also fails the criterion
        prev = _outcomes.get(report.nodeid, "passed")
        _outcomes[report.nodeid] = report.outcome if prev == "passed" else prev


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted((_criteria[n][0], _criteria[n][1], o) for n, o in _outcomes.items())
    for number, title, outcome in rows:
        status = {"passed": "PASS", "skipped": "SKIP"}.get(outcome, "FAIL")
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")


@pytest.fixture(scope="session")
def campaign():
    """The randomized adversarial campaign, run once per session."""
    start = time.perf_counter()
    reports = []
    for seed in range(CAMPAIGN_SEEDS):
        spec = adversarial_scenario(seed)
        r = run_scenario(spec, seed)
        reports.append((seed, spec, r))
    return {"reports": reports, "elapsed": time.perf_counter() - start}
