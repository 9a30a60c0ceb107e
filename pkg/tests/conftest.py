import pytest

from hhladder import FullToKmax, TermLabel, assemble_W, enumerate_basis


@pytest.fixture(scope="session")
def helium():
    return TermLabel.helium_like(2.0)


@pytest.fixture(scope="session")
def he_W(helium):
    """Potential matrices for helium keyed by Kmax, built on demand."""
    cache = {}

    def get(Kmax):
        if Kmax not in cache:
            cache[Kmax] = assemble_W(enumerate_basis(helium, FullToKmax(Kmax)))
        return cache[Kmax]

    return get


ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""

    def add(criterion, passed, detail):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
