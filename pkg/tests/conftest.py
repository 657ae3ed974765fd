import numpy as np
import pytest

from impulsekit.assets import sample_image


@pytest.fixture(scope="session")
def portrait():
    """The bundled 512x512 test photograph."""
    return sample_image()


@pytest.fixture()
def rng():
    return np.random.Generator(np.random.PCG64(20260814))


def constant_image(value, height=8, width=8):
    return np.full((height, width, 3), value, dtype=np.uint8)
