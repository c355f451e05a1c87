import pytest

# (criterion number, description, passed, detail) appended by test_acceptance.
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def criterion():
    def record(num: int, desc: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.append((num, desc, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {desc}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
