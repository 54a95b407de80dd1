from pathlib import Path

import pytest

from leroy import interp
from leroy import syntax as ast

FIXTURES = Path(__file__).parent / "fixtures"


def load_dir(path: Path) -> tuple:
    """(paths, programs) for the .py files of a fixture directory, by name."""
    paths = sorted(path.glob("*.py"))
    return paths, [ast.parse_program(p.read_text(), str(p)) for p in paths]


def script_for(path: Path) -> list:
    script = path.with_suffix(".in")
    return interp.parse_script(script.read_text()) if script.exists() else []


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
