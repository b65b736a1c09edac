import numpy as np
import pytest

from dchsim import Field, build_grid


@pytest.fixture
def grid20():
    return build_grid(20.0, 1024)


@pytest.fixture
def grid30():
    return build_grid(30.0, 2048)


def band_limited_field(grid, seed, modes=24, amplitude=1.0, envelope_frac=1.0 / 12.0):
    """Random smooth decaying field: low-mode trig polynomial under a
    Gaussian envelope, normalized to the requested amplitude.

    Spectrally resolved and below 1e-12 relative at the box edge, so it
    satisfies the quadrature oracles' decay precondition.
    """
    rng = np.random.default_rng(seed)
    x = grid.x
    vals = np.zeros_like(x)
    for m in range(1, modes + 1):
        a, b = rng.standard_normal(2) / m
        vals += a * np.cos(np.pi * m * x / grid.half_width)
        vals += b * np.sin(np.pi * m * x / grid.half_width)
    vals += rng.standard_normal()
    sigma = envelope_frac * grid.half_width
    vals *= np.exp(-((x / sigma) ** 2) / 2.0)
    peak = np.abs(vals).max()
    if peak > 0:
        vals *= amplitude / peak
    return Field(vals, grid)
