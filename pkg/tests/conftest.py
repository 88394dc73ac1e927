import random

import pytest
from hypothesis import settings

settings.register_profile("repvar", max_examples=60, deadline=None)
settings.load_profile("repvar")


@pytest.fixture
def rng():
    return random.Random(1234)
