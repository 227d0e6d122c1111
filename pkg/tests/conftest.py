import time
from contextlib import contextmanager

import pytest

RESULTS: dict[int, tuple[str, str, float]] = {}


@pytest.fixture
def criterion():
    """Time a criterion, check its limit and record a pass/fail line for the summary."""

    @contextmanager
    def run(number: int, title: str, limit: float | None = None):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            if status == "PASS" and limit is not None and elapsed > limit:
                status = f"FAIL (over the {limit:g} s limit)"
            RESULTS[number] = (title, status, elapsed)
        if status != "PASS":
            pytest.fail(f"criterion {number} took {elapsed:.1f} s, limit {limit:g} s")

    return run


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, status, elapsed = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status:<4}  {elapsed:7.2f} s  {title}")
