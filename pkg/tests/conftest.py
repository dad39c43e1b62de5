from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def cruise_path():
    return ROOT / "scenarios" / "circular_cruise.json"
