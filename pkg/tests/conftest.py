import os
import pathlib

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def atp_fixture() -> str:
    return str(DATA_DIR / "atp_fixture.csv")


@pytest.fixture
def wta_fixture() -> str:
    return str(DATA_DIR / "wta_fixture.csv")


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
