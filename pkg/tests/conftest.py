import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "tests"))

FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
