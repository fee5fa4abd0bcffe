import pytest

_ACCEPTANCE: list[str] = []


class AcceptanceLog:
    """Collects one PASS/FAIL line per acceptance criterion."""

    def record(self, number: int, name: str, ok: bool, detail: str) -> bool:
        line = f"[{number:2d}] {'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceLog:
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
