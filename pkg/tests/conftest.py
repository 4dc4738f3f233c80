import pytest


@pytest.fixture
def criterion(request):
    """Collect one-line verdicts shown in the terminal summary."""

    def report(line: str) -> None:
        lines = getattr(request.config, "_criterion_lines", None)
        if lines is None:
            lines = []
            request.config._criterion_lines = lines
        lines.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
