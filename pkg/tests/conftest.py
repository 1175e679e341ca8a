from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

FIXTURES = ROOT / "tests" / "fixtures"


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> Path:
        return FIXTURES / f"{name}.npp"

    return resolve


@pytest.fixture
def load_fixture(fixture_path):
    from reach_bounds.services.parser import load_program

    def load(name: str):
        return load_program(fixture_path(name))

    return load
