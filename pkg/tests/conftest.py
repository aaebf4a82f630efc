import pytest

# lines recorded by the acceptance suite, echoed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    def record(label, ok, detail, elapsed):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail} ({elapsed:.2f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
