import pytest

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title)(ok, detail)``."""

    def start(number: int, title: str):
        ACCEPTANCE[number] = (title, False, "did not finish")

        def finish(ok: bool, detail: str) -> bool:
            ACCEPTANCE[number] = (title, bool(ok), detail)
            print(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}")
            return bool(ok)

        return finish

    return start


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
