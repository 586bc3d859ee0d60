import json
from decimal import Decimal
from pathlib import Path

import pytest

from belieflang import load_model

FIXTURES = Path(__file__).parent / "fixtures"


def read_fixture(name: str) -> dict:
    text = (FIXTURES / f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text, parse_float=Decimal)


@pytest.fixture
def fixture_path():
    """Fixture resolving a model fixture name to its JSON path."""

    def resolve(name: str) -> Path:
        return FIXTURES / f"{name}.json"

    return resolve


@pytest.fixture
def m0_doc():
    """Fixture with the raw document of the two-state trade model."""
    return read_fixture("m0")


@pytest.fixture
def m0(m0_doc):
    """Fixture with the loaded two-state trade model."""
    return load_model(m0_doc)


@pytest.fixture
def credit():
    """Fixture with the credit model: agents a, b blind; c, d informed."""
    return load_model(FIXTURES / "credit.json")


@pytest.fixture
def kb():
    """Fixture with the model where knowledge does not imply belief."""
    return load_model(FIXTURES / "kb.json")
