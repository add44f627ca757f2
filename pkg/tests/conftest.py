import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from scenebench.vocab import default_table


@pytest.fixture(scope="session")
def table():
    return default_table()
