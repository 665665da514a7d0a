import numpy as np
import pytest

from adimax import FieldState, Medium, enforce_pec, extent, make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def medium():
    return Medium(1.0, 1.0)


def random_state(grid, rng, pec=True, time_level=0.0) -> FieldState:
    """Random fields; with pec=True the tangential-E wall entries are zeroed."""
    state = FieldState(
        *(rng.standard_normal(extent(c, grid)) for c in ("ex", "ey", "ez", "hx", "hy", "hz")),
        time_level=time_level,
    )
    return enforce_pec(state) if pec else state


def grid3(dt=0.4):
    return make_grid(3, 3, 3, dt)


def grid4(dt=0.4):
    return make_grid(4, 4, 4, dt)


def max_component_diff(a: FieldState, b: FieldState) -> float:
    return max(float(np.max(np.abs(getattr(a, c) - getattr(b, c))))
               for c in ("ex", "ey", "ez", "hx", "hy", "hz"))
