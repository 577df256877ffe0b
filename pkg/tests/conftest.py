from pathlib import Path

import pytest

from dsimon.gf2 import BitString
from dsimon.instance import appendix_a, read_table

ROOT = Path(__file__).resolve().parents[1]
FIXTURE = ROOT / "fixtures" / "appendix_a.tt"


def bs(text: str) -> BitString:
    return BitString.parse(text)


@pytest.fixture
def fa():
    return appendix_a()


@pytest.fixture
def fixture_path():
    return FIXTURE


@pytest.fixture
def fa_file():
    return read_table(FIXTURE)
