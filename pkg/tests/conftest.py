from pathlib import Path

import numpy as np
import pytest

from attrsel import parse_arff, validate_target

DATA = Path(__file__).parent / "data"
SAMPLE_PATH = DATA / "sample_dekad.arff"


@pytest.fixture
def sample_text():
    return SAMPLE_PATH.read_text()


@pytest.fixture
def sample(sample_text):
    return parse_arff(sample_text)


@pytest.fixture
def sample_target(sample):
    return validate_target(sample, "SSG_dek23")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed again at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
