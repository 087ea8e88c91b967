import pytest

from mcnn_phase.cell import CellParams
from mcnn_phase.field import PhaseGrid


@pytest.fixture(scope="session")
def default_params() -> CellParams:
    return CellParams()


@pytest.fixture(scope="session")
def default_grid() -> PhaseGrid:
    return PhaseGrid()


def record_criterion(config, tag: str, ok: bool, detail: str) -> None:
    """Collect one acceptance-criterion outcome for the terminal summary."""
    lines = getattr(config, "_criterion_lines", None)
    if lines is None:
        lines = []
        config._criterion_lines = lines
    lines.append(f"{tag} {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
