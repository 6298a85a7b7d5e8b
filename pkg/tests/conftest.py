import numpy as np
import pytest

from csd1d import (
    CouplingKind,
    DataSpec,
    ModelParams,
    State,
    generate_data,
    make_grid,
)


@pytest.fixture
def grid():
    return make_grid(-8.0, 8.0, 512)


def bump_state(grid, params, seed, amplitude=0.4, spread=3.0):
    """Random compactly supported state used across the solver tests."""
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**31, size=4)

    def f(s):
        return generate_data(
            DataSpec(kind="random_bumps", width=0.8, amplitude=amplitude,
                     seed=int(s), n_bumps=3, spread=spread),
            grid,
        ).values

    return State.from_arrays(
        grid, f(seeds[0]), f(seeds[1]), f(seeds[2]).real, f(seeds[3]).real, params
    )


@pytest.fixture
def small_state(grid):
    params = ModelParams(alpha=CouplingKind.NULL_GAMMA0, m=1.0, p=1.0)
    return bump_state(grid, params, seed=42)
