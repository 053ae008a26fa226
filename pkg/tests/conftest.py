from __future__ import annotations

import random

import pytest

from ainfty.fields import Field


@pytest.fixture
def qq() -> Field:
    return Field.rationals()


@pytest.fixture
def f5() -> Field:
    return Field.prime(5)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
