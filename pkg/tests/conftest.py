import sys
from importlib.resources import files
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from twocross.cli import parse_model  # noqa: E402


def model_path(name: str):
    return files("twocross") / "models" / f"{name}.model"


@pytest.fixture(scope="session")
def load_model():
    return lambda name: parse_model(model_path(name))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
