from pathlib import Path

import pytest

from ccview.textual import parse_model, parse_view

FIXTURES = Path(__file__).parent / "fixtures"

VIEW_FILES = {
    "UserButton": "userbutton.ccv",
    "ASPumpingSystem": "aspumpingsystem.ccv",
    "PCPumpingSystem": "pcpumpingsystem.ccv",
    "SystemEmergencyController": "systememergencycontroller.ccv",
}

# (criterion, description, passed, detail) lines reported at the end of the run
ACCEPTANCE: list[tuple[str, str, bool, str]] = []


def load_model(name="pumpstation.ccm"):
    path = FIXTURES / name
    return parse_model(path.read_text(), file=str(path))


def load_view(name):
    path = FIXTURES / VIEW_FILES.get(name, name)
    return parse_view(path.read_text(), file=str(path))


@pytest.fixture(scope="session")
def pump():
    return load_model()


@pytest.fixture(scope="session")
def views():
    return {name: load_view(name) for name in VIEW_FILES}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, desc, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0])):
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {desc} -- {detail}")
