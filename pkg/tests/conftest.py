import pytest

from persorec import SynthConfig, generate_synthetic


@pytest.fixture(scope="session")
def small_dataset():
    return generate_synthetic(SynthConfig(n_users=40, n_items=80, n_labels=6, views_per_user=15, seed=11))


# Acceptance criteria append (line, detail) records here; printed after the run.
ACCEPTANCE_REPORT: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line, detail in sorted(ACCEPTANCE_REPORT):
        terminalreporter.write_line(line)
        for extra in detail.splitlines():
            terminalreporter.write_line("    " + extra)
