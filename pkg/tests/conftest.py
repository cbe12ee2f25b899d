import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from infobattery import data_path  # noqa: E402
from infobattery.trace import ingest_trace  # noqa: E402


@pytest.fixture(scope="session")
def sample_trace():
    return ingest_trace(data_path("sample_trace.csv"), "SYNTH")


@pytest.fixture
def write_csv(tmp_path):
    def _write(text: str, name: str = "t.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per criterion, then fail the test if needed."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
