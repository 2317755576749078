from __future__ import annotations

from pathlib import Path

import pytest

from typel.parser import parse_kb

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str):
    path = fixture_path(name)
    return parse_kb(path.read_text(), filename=str(path))


@pytest.fixture
def example1():
    return load_fixture("example1.kbt")


@pytest.fixture
def example1_af():
    return load_fixture("example1-af.kbt")


@pytest.fixture
def example4():
    return load_fixture("example4.kbt")
