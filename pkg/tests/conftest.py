import pytest

from rowsample import kernels

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.available_backends()[request.param]


@pytest.fixture
def acceptance_report():
    def report(number: int, ok: bool, detail: str):
        line = "criterion %2d: %s  %s" % (number, "PASS" if ok else "FAIL", detail)
        ACCEPTANCE_LINES.append(line)
        print(line)
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
