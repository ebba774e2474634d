from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from trihardy import HardyParams


def make_params(rng: np.random.Generator, low: float = 0.05, high: float = 0.95) -> HardyParams:
    """A random valid parameter triple, built so t is inside its open bound."""
    r = rng.uniform(low, high)
    s = rng.uniform(low, high)
    tau = rng.uniform(low, high)
    t = tau * (1.0 - s) / (1.0 - r * s)
    return HardyParams(r, s, t)


@st.composite
def params_strategy(draw) -> HardyParams:
    r = draw(st.floats(0.02, 0.98))
    s = draw(st.floats(0.02, 0.98))
    tau = draw(st.floats(0.02, 0.98))
    return HardyParams(r, s, tau * (1.0 - s) / (1.0 - r * s))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260814)
