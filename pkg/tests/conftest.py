from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one acceptance criterion; the summary prints after the run."""

    def record(number: int, ok: bool, detail: str) -> None:
        _RESULTS[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, detail = _RESULTS[number]
        terminalreporter.write_line(f"ACCEPTANCE criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
