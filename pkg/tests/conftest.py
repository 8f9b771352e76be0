"""Shared fixtures: the acceptance-criterion reporter and the one-shot
full training suite that several acceptance tests read from."""

import time

import pytest

_criterion_results = []


@pytest.fixture
def criterion():
    """Record a named acceptance-criterion outcome, then assert it.

    Every acceptance test funnels its verdict through this so the run
    ends with one PASS/FAIL line per criterion in the terminal summary.
    """

    def check(name, passed, detail=""):
        _criterion_results.append((name, bool(passed), detail))
        assert passed, f"{name}: {detail}" if detail else name

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criterion_results:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def full_suite(tmp_path_factory):
    """Train and test every preset across ten seeds, once per session.

    Returns (results, wall_seconds, out_dir). This is the expensive
    end-to-end run (several minutes); everything downstream shares it.
    """
    from softmanip.harness import run_suite

    out = tmp_path_factory.mktemp("suite")
    started = time.perf_counter()
    results = run_suite(out, seeds=10)
    wall = time.perf_counter() - started
    return results, wall, out
