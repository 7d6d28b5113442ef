import json
from pathlib import Path

import pytest
from hypothesis import settings

FIXTURES = Path(__file__).resolve().parent / "fixtures"

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def golden_rng():
    return json.loads((FIXTURES / "rng_golden.json").read_text(encoding="utf-8"))
