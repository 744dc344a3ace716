import os
import sys
from pathlib import Path

# Add project root to Python path
root_dir = str(Path(__file__).parent.parent)
sys.path.insert(0, root_dir)

# Set test environment
os.environ['APP_ENV'] = 'test'

import pytest  # noqa: E402

from app.core.rng import RandomStream  # noqa: E402


@pytest.fixture
def rng() -> RandomStream:
    """Seeded stream shared by a single test."""
    return RandomStream(20240611)
