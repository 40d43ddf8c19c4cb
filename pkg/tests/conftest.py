from __future__ import annotations

import numpy as np
import pytest

from fracdhk.primitives import Interval


@pytest.fixture
def unit() -> Interval:
    return Interval(0.0, 1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
