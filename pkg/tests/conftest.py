import pytest

_ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance():
    """Record one ``AC-n: PASS|FAIL ...`` line per criterion."""

    def record(name: str, ok: bool, detail: str) -> bool:
        line = f"{name}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES[name] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_LINES, key=lambda k: int(k.split("-")[1])):
        terminalreporter.write_line(_ACCEPTANCE_LINES[name])
