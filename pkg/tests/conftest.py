import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent

# make the helper modules (sqlrender, randgen, difforacle) importable
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture
def fixtures() -> Path:
    return TESTS_DIR / "fixtures"


@pytest.fixture
def example1_text(fixtures) -> str:
    return (fixtures / "example1.sql").read_text()
