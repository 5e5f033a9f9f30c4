import pytest

from glvsim.config import load_config


@pytest.fixture(scope="session")
def setup_default():
    return load_config()


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test when the criterion fails."""

    def report(number: int, ok: bool, detail: str, wall: float | None = None):
        status = "PASS" if ok else "FAIL"
        timing = "" if wall is None else f" [{wall:.1f} s]"
        line = f"criterion {number:2d}: {status}  {detail}{timing}"
        _ACCEPTANCE[number] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
