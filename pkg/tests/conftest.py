"""Shared pytest plumbing: collects acceptance-criterion result lines."""

acceptance_lines: list[str] = []


def record_criterion(line: str) -> None:
    acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(acceptance_lines):
            terminalreporter.write_line(line)
